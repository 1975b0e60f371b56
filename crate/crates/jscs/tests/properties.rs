//! Property tests for the model invariants.

mod common;

use common::EnvSampler;
use jscs::joint_optimizer::p_total;
use jscs::{appos_model, normal_tail, spectrum_sensing};
use proptest::prelude::*;

proptest! {
    #[test]
    fn tail_round_trip(p in 1e-8f64..=0.999_999_99) {
        let x = normal_tail::q_inv(p).unwrap();
        let back = normal_tail::q(x).unwrap().get();
        prop_assert!((back - p).abs() <= 1e-10 * p.max(1e-3));
    }

    #[test]
    fn tail_monotone_and_symmetric(a in -8.0f64..8.0, d in 1e-4f64..2.0) {
        let b = (a + d).min(8.0);
        let qa = normal_tail::q(a).unwrap().get();
        let qb = normal_tail::q(b).unwrap().get();
        prop_assert!(qb <= qa);
        prop_assert!((qa + normal_tail::q(-a).unwrap().get() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn transmit_probability_inversion(seed in any::<u64>(), t in 1e-4f64..=0.9999) {
        let (senv, _) = EnvSampler::new(seed).pair(0);
        let lb = spectrum_sensing::p_t_lower_bound(&senv);
        let p = lb + (senv.p_h0() - lb) * t * (1.0 - 1e-6);
        let n = spectrum_sensing::n_of_p_t(p, &senv).unwrap();
        let back = spectrum_sensing::p_t_of_n(n, &senv).unwrap().get();
        prop_assert!((back - p).abs() / p <= 1e-8, "p = {p}, back = {back}");
    }

    #[test]
    fn transmit_decomposition_identity(seed in any::<u64>(), n in 1.0f64..1e6) {
        let (senv, _) = EnvSampler::new(seed).pair(1);
        let d = spectrum_sensing::design_for_n(n, &senv).unwrap();
        // raw = effective + collision, exactly as constructed
        prop_assert_eq!(
            d.p_transmit_raw.get(),
            d.p_transmit_eff.get() + d.p_collision.get()
        );
        // and the threshold meets the miss cap
        prop_assert!((d.p_d.get() - (1.0 - senv.p_e())).abs() <= 1e-9);
    }

    #[test]
    fn detector_statistics_consistency(
        seed in any::<u64>(),
        n in 1.0f64..1e6,
        eps_scale in 0.5f64..2.0,
    ) {
        let (senv, _) = EnvSampler::new(seed).pair(2);
        let stats = spectrum_sensing::detector_statistics(n, &senv).unwrap();
        let eps = senv.noise_power() * eps_scale;
        let fa = spectrum_sensing::p_fa_of(eps, n, &senv).unwrap().get();
        let pd = spectrum_sensing::p_d_of(eps, n, &senv).unwrap().get();
        prop_assert!((stats.exceed_h0(eps).get() - fa).abs() <= 1e-12);
        prop_assert!((stats.exceed_h1(eps).get() - pd).abs() <= 1e-12);
    }

    #[test]
    fn reporting_power_is_strictly_decreasing(
        seed in any::<u64>(),
        a in 0.01f64..0.99,
        d in 1e-3f64..0.5,
    ) {
        let (senv, aenv) = EnvSampler::new(seed).pair(3);
        let b = (a + d).min(1.0);
        let wa = appos_model::p_appos(a, &aenv, &senv).unwrap();
        let wb = appos_model::p_appos(b, &aenv, &senv).unwrap();
        prop_assert!(wb < wa, "p_appos({a}) = {wa} vs p_appos({b}) = {wb}");
    }

    #[test]
    fn reporting_power_is_convex(
        seed in any::<u64>(),
        mid in 0.05f64..0.95,
        h in 1e-3f64..0.04,
    ) {
        let (senv, aenv) = EnvSampler::new(seed).pair(4);
        let (lo, hi) = (mid - h, mid + h);
        prop_assume!(lo > 0.0 && hi <= 1.0);
        let f = |p| appos_model::p_appos(p, &aenv, &senv).unwrap();
        prop_assert!(f(lo) - 2.0 * f(mid) + f(hi) > 0.0);
    }

    #[test]
    fn reporting_power_composition_identity(seed in any::<u64>(), p_t in 0.02f64..=1.0) {
        let (senv, aenv) = EnvSampler::new(seed).pair(5);
        let direct = appos_model::p_appos(p_t, &aenv, &senv).unwrap();
        let rates = appos_model::rate_pair(p_t, &aenv).unwrap();
        let e_bit = appos_model::energy_per_bit(rates.r_channel, &aenv).unwrap();
        let composed = (p_t + senv.p_e() * senv.p_h1()) * e_bit * rates.r_channel;
        prop_assert!((direct - composed).abs() / direct <= 1e-12);
    }

    #[test]
    fn energy_per_bit_never_beats_the_shannon_floor(
        seed in any::<u64>(),
        r in 1e-3f64..1e8,
    ) {
        let (_, aenv) = EnvSampler::new(seed).pair(6);
        let floor = aenv.n0() * std::f64::consts::LN_2;
        prop_assert!(appos_model::energy_per_bit(r, &aenv).unwrap() > floor);
    }

    #[test]
    fn total_power_continuous_at_the_regime_boundary(seed in any::<u64>()) {
        let (senv, aenv) = EnvSampler::new(seed).pair(7);
        let lb = spectrum_sensing::p_t_lower_bound(&senv);
        let below = p_total(lb * (1.0 - 1e-9), &senv, &aenv).unwrap();
        let above = p_total(lb * (1.0 + 1e-9), &senv, &aenv).unwrap();
        prop_assert_eq!(below.regime, jscs::Regime::NoSensing);
        prop_assert_eq!(above.regime, jscs::Regime::Sensing);
        let jump = (below.p_total_w - above.p_total_w).abs();
        prop_assert!(jump / below.p_total_w < 1e-6, "jump = {}", jump);
    }

    #[test]
    fn operating_point_fields_are_consistent(seed in any::<u64>(), t in 0.01f64..0.99) {
        let (senv, aenv) = EnvSampler::new(seed).pair(8);
        let p_t = senv.p_h0() * t.clamp(1e-3, 1.0 - 1e-6);
        let pt = p_total(p_t, &senv, &aenv).unwrap();
        prop_assert_eq!(pt.p_total_w, pt.p_amos_w + pt.p_appos_w);
        prop_assert!((0.0..=1.0).contains(&pt.amos_share));
        prop_assert_eq!(pt.regime == jscs::Regime::NoSensing, pt.n_samples == 0.0);
        if pt.p_total_w.is_finite() && pt.p_total_w > 0.0 {
            let share = pt.p_amos_w / pt.p_total_w;
            prop_assert_eq!(pt.amos_share, share);
        }
    }
}
