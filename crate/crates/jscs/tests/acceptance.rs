//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line (`cargo test --test acceptance -- --nocapture` to see them all).

mod common;

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use common::EnvSampler;
use jscs::cli::{cmd_optimize, cmd_sweep, SweepTarget};
use jscs::joint_optimizer::{
    calibrate, certify_convexity, minimize, p_total, p_total_deriv, p_total_ln, search_grid,
    ReportedOptimum,
};
use jscs::montecarlo::{run, validate_against_analytic, SignalModel, SimConfig};
use jscs::{
    appos_model, finite_diff, normal_tail, spectrum_sensing, ScenarioConfig, SensingEnv, SourceEnv,
};

fn report(criterion: &str, pass: bool, detail: &str) {
    println!("[{}] {criterion}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{criterion}: {detail}");
}

// The criteria carry per-criterion runtime budgets, so they must not fight
// each other for the two-ish cores the harness runs tests on.
static SEQUENTIAL: std::sync::Mutex<()> = std::sync::Mutex::new(());

fn run_alone() -> std::sync::MutexGuard<'static, ()> {
    SEQUENTIAL.lock().unwrap_or_else(|e| e.into_inner())
}

#[test]
fn criterion_1_reference_optimum_with_calibration() {
    let _guard = run_alone();
    let scenario = ScenarioConfig::default();

    // Two-equation fit of the free parameters (slot length, noise density)
    // to the published operating point; the fit is part of the contract.
    let reported = ReportedOptimum {
        p_t: 0.42,
        total_power_w: 4.8,
        amos_share: 0.051,
    };
    let cal = calibrate(&scenario.senv, &scenario.aenv, &reported).unwrap();
    report(
        "criterion 1 (calibration)",
        (cal.slot_len - 1.0).abs() <= 0.05 && (cal.n0 - 2.52e-5).abs() / 2.52e-5 <= 0.01,
        &format!(
            "fit gives T = {:.4} s (expect ~1), N0 = {:.4e} W/Hz (expect ~2.52e-5), N* = {:.1}",
            cal.slot_len, cal.n0, cal.n_samples_at_target
        ),
    );

    // The canonical scenario rounds the fit to T = 1 s, N0 = 2.52e-5 (the
    // built-in defaults). The optimizer must land on the reported point.
    let t0 = Instant::now();
    let rows = cmd_optimize(&scenario, &[], &[], 1e-4, None).unwrap();
    let elapsed = t0.elapsed().as_secs_f64();
    let p = &rows[0].optimum.point;
    let ok = (p.p_t - 0.42).abs() <= 0.03
        && (p.p_total_w - 4.8).abs() / 4.8 <= 0.05
        && (p.amos_share - 0.051).abs() <= 0.01
        && elapsed < 1.0;
    report(
        "criterion 1 (optimum)",
        ok,
        &format!(
            "p_t* = {:.4} (0.42±0.03), P* = {:.4} W (4.8±5%), share = {:.4} (0.051±0.01), {:.2}s (<1s)",
            p.p_t, p.p_total_w, p.amos_share, elapsed
        ),
    );
}

fn read_curve(path: &Path) -> Vec<(f64, f64)> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .skip(1)
        .map(|l| {
            let mut it = l.split(',');
            let p_t: f64 = it.next().unwrap().parse().unwrap();
            let power: f64 = it.next().unwrap().parse().unwrap();
            (p_t, power)
        })
        .collect()
}

#[test]
fn criterion_2_figure_shapes() {
    let _guard = run_alone();
    let t0 = Instant::now();
    let scenario = ScenarioConfig::default();
    let dir = tempfile::tempdir().unwrap();
    let pu = [-20.0, -15.0, -10.0];
    let src = [5.0, 10.0, 15.0];

    // sensing power: non-decreasing in p_t, noisier primary -> higher curve
    let files = cmd_sweep(
        &scenario,
        SweepTarget::Amos,
        &pu,
        &[10.0],
        &dir.path().join("amos.csv"),
    )
    .unwrap();
    let amos: Vec<Vec<(f64, f64)>> = files.iter().map(|f| read_curve(f)).collect();
    let mut ok = true;
    for c in &amos {
        ok &= c.windows(2).all(|w| w[1].1 >= w[0].1);
    }
    for noisier_cleaner in amos.windows(2) {
        ok &= noisier_cleaner[0]
            .iter()
            .zip(&noisier_cleaner[1])
            .all(|(a, b)| a.1 > b.1);
    }
    report(
        "criterion 2 (sensing curves)",
        ok,
        "non-decreasing, ordered by primary noise at every grid point",
    );

    // reporting power: strictly decreasing, noisier source -> higher curve
    let files = cmd_sweep(
        &scenario,
        SweepTarget::Appos,
        &[-15.0],
        &src,
        &dir.path().join("appos.csv"),
    )
    .unwrap();
    let appos: Vec<Vec<(f64, f64)>> = files.iter().map(|f| read_curve(f)).collect();
    let mut ok = true;
    for c in &appos {
        ok &= c.windows(2).all(|w| w[1].1 < w[0].1);
    }
    for noisier_cleaner in appos.windows(2) {
        ok &= noisier_cleaner[0]
            .iter()
            .zip(&noisier_cleaner[1])
            .all(|(a, b)| a.1 > b.1);
    }
    report(
        "criterion 2 (reporting curves)",
        ok,
        "strictly decreasing, ordered by observation noise at every grid point",
    );

    // total power: exactly one interior minimum per curve
    let files = cmd_sweep(
        &scenario,
        SweepTarget::Total,
        &pu,
        &src,
        &dir.path().join("total.csv"),
    )
    .unwrap();
    let mut ok = files.len() == 9;
    for f in &files {
        let c = read_curve(f);
        let v: Vec<f64> = c.iter().map(|r| r.1).collect();
        let minima = (1..v.len() - 1)
            .filter(|&i| v[i] < v[i - 1] && v[i] < v[i + 1])
            .count();
        let argmin = v
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        ok &= minima == 1 && argmin > 0 && argmin < v.len() - 1;
    }
    let elapsed = t0.elapsed().as_secs_f64();
    ok &= elapsed < 5.0;
    report(
        "criterion 2 (total curves)",
        ok,
        &format!("9 curves, each with exactly one interior minimum, {elapsed:.2}s (<5s)"),
    );
}

#[test]
fn criterion_3_reporting_power_monotone_over_random_envs() {
    let _guard = run_alone();
    let envs = EnvSampler::new(0x5eed_0003).pairs(1000);
    let violations: usize = envs
        .par_iter()
        .map(|(senv, aenv)| {
            let mut bad = 0;
            let mut prev = f64::INFINITY;
            for i in 0..256 {
                let p_t = 0.01 + (1.0 - 0.01) * i as f64 / 255.0;
                let w = appos_model::p_appos(p_t, aenv, senv).unwrap();
                if w >= prev {
                    bad += 1;
                }
                prev = w;
            }
            bad
        })
        .sum();
    report(
        "criterion 3 (monotone reporting power)",
        violations == 0,
        &format!("{violations} violations over 1000 environments x 256-point grids"),
    );
}

#[test]
fn criterion_4_convexity_over_random_envs() {
    let _guard = run_alone();
    let envs = EnvSampler::new(0x5eed_0003).pairs(1000);
    let failures: usize = envs
        .par_iter()
        .map(|(senv, aenv)| {
            let r = certify_convexity(senv, aenv, 256).unwrap();
            usize::from(!r.certified) + r.violations_inside.len()
        })
        .sum();
    report(
        "criterion 4 (convexity where claimed)",
        failures == 0,
        &format!("{failures} second-difference violations on p_t > p(H0)/2 over 1000 environments"),
    );
}

#[test]
fn criterion_5_boundary_blowups_and_grid_oracle() {
    let _guard = run_alone();
    let t0 = Instant::now();
    let envs = EnvSampler::new(0x5eed_0005).pairs(20);

    let mut shape_ok = true;
    for (senv, aenv) in &envs {
        let grid = search_grid(senv, 512);
        let v: Vec<f64> = grid
            .iter()
            .map(|&p| p_total_ln(p, senv, aenv).unwrap())
            .collect();
        let n = v.len();
        for i in 0..3 {
            shape_ok &= v[i + 1] < v[i];
        }
        for i in n - 3..n {
            shape_ok &= v[i] > v[i - 1];
        }
    }
    report(
        "criterion 5 (boundary blow-ups)",
        shape_ok,
        "log-clustered grid decreases over its first 3 steps and increases over its last 3",
    );

    let mut worst_dp = 0.0f64;
    let mut worst_dw = 0.0f64;
    for (senv, aenv) in &envs {
        let opt = minimize(senv, aenv, 1e-4).unwrap();
        let p_h0 = senv.p_h0();
        let n = 1_000_000u64;
        let step = p_h0 / (n + 1) as f64;
        let oracle = (1..=n)
            .into_par_iter()
            .map(|i| {
                let p = step * i as f64;
                (p, p_total_ln(p, senv, aenv).unwrap())
            })
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        let oracle_power = p_total(oracle.0, senv, aenv).unwrap().p_total_w;
        worst_dp = worst_dp.max((opt.point.p_t - oracle.0).abs());
        worst_dw = worst_dw.max(
            (opt.point.p_total_w - oracle_power).abs() / oracle_power,
        );
    }
    let elapsed = t0.elapsed().as_secs_f64();
    let ok = worst_dp <= 1e-4 && worst_dw <= 1e-6 && elapsed < 30.0;
    report(
        "criterion 5 (exhaustive-grid oracle)",
        ok,
        &format!(
            "20 envs: max |Δp_t| = {worst_dp:.2e} (<=1e-4), max rel power gap = {worst_dw:.2e} (<=1e-6), {elapsed:.1}s (<30s)"
        ),
    );
}

/// The reporting-power derivative as it appears in print elsewhere, with a
/// `(1 + p(H1))` product-rule factor. Kept here as a negative control: it
/// does NOT match finite differences, which is why the crate derives the
/// derivative directly instead of transcribing it.
fn printed_form_deriv(p_t: f64, senv: &SensingEnv, aenv: &SourceEnv) -> f64 {
    let l = aenv.symbol_rate();
    let w = aenv.bandwidth();
    let ln_c = aenv.rate_base().ln();
    let c_pow = (ln_c * l / (2.0 * p_t * w)).exp();
    -(((l * (1.0 + senv.p_h1()) * ln_c - 2.0 * p_t * w) * c_pow + 2.0 * p_t * w) * aenv.n0())
        / (2.0 * p_t)
}

#[test]
fn criterion_6_derivatives_match_finite_differences() {
    let _guard = run_alone();
    let envs = EnvSampler::new(0x5eed_0006).pairs(20);
    let h = 1e-6;
    let mut worst_appos = 0.0f64;
    let mut worst_total = 0.0f64;

    for (idx, (senv, aenv)) in envs.iter().enumerate() {
        let mut rng = jscs::rng::CounterRng::new(0xd1ff, idx as u64);

        // reporting-power derivative on (0, 1]
        let xs: Vec<f64> = (0..100).map(|_| 0.02 + 0.977 * rng.next_f64()).collect();
        let check = finite_diff::check_derivative(
            |x| appos_model::p_appos(x, aenv, senv).unwrap(),
            |x| appos_model::p_appos_deriv(x, aenv, senv).unwrap(),
            &xs,
            h,
        );
        worst_appos = worst_appos.max(check.max_rel_err);

        // total-power derivative strictly inside the sensing regime
        let lb = spectrum_sensing::p_t_lower_bound(senv);
        let hi = senv.p_h0();
        let w = hi - lb;
        let xs: Vec<f64> = (0..100)
            .map(|_| lb + w * (0.02 + 0.96 * rng.next_f64()))
            .collect();
        let check = finite_diff::check_derivative(
            |x| p_total(x, senv, aenv).unwrap().p_total_w,
            |x| p_total_deriv(x, senv, aenv).unwrap(),
            &xs,
            h,
        );
        worst_total = worst_total.max(check.max_rel_err);
    }
    report(
        "criterion 6 (derivative checks)",
        worst_appos <= 1e-6 && worst_total <= 1e-6,
        &format!(
            "20 envs x 100 points: max rel err reporting {worst_appos:.2e}, total {worst_total:.2e} (<=1e-6)"
        ),
    );

    // negative control: the printed product-rule variant fails the same check
    let scenario = ScenarioConfig::default();
    let (senv, aenv) = (&scenario.senv, &scenario.aenv);
    let mut worst_printed = 0.0f64;
    for i in 0..20 {
        let x = 0.1 + 0.85 * i as f64 / 19.0;
        let a = printed_form_deriv(x, senv, aenv);
        let fd = (appos_model::p_appos(x + h, aenv, senv).unwrap()
            - appos_model::p_appos(x - h, aenv, senv).unwrap())
            / (2.0 * h);
        worst_printed = worst_printed.max((a - fd).abs() / a.abs().max(fd.abs()));
    }
    report(
        "criterion 6 (printed-form negative control)",
        worst_printed > 1e-3,
        &format!("printed product-rule variant deviates by {worst_printed:.2e} from finite differences"),
    );
}

#[test]
fn criterion_7_montecarlo_matches_closed_forms() {
    let _guard = run_alone();
    let t0 = Instant::now();
    let senv = ScenarioConfig::default().senv;
    let sim = SimConfig::for_transmit_probability(
        senv,
        0.42,
        100_000,
        20_260_810,
        SignalModel::ComplexGaussian,
    )
    .unwrap();
    assert_eq!(sim.n_samples, 2481);

    // bit-exact seed determinism
    let a = run(&sim).unwrap();
    let b = run(&sim).unwrap();
    report(
        "criterion 7 (determinism)",
        a == b,
        "two runs with the same seed agree bit for bit",
    );

    let gauss = validate_against_analytic(&sim).unwrap();
    let analytic: Vec<f64> = gauss.checks.iter().map(|c| c.analytic).collect();
    let anchored = (analytic[0] - 0.9).abs() < 1e-6
        && (analytic[1] - 0.4).abs() < 5e-3
        && (analytic[2] - 0.42).abs() < 5e-3;
    report(
        "criterion 7 (closed-form anchor)",
        anchored,
        &format!(
            "analytic targets p_d = {:.4}, p_fa = {:.4}, p_t = {:.4}",
            analytic[0], analytic[1], analytic[2]
        ),
    );
    report(
        "criterion 7 (gaussian signal)",
        gauss.pass,
        &format!("max |z| = {:.2} over 1e5 slots at N = 2481 (limit 4)", gauss.max_abs_z),
    );

    let mpsk_sim = SimConfig::for_transmit_probability(
        senv,
        0.42,
        100_000,
        20_260_811,
        SignalModel::Mpsk(4),
    )
    .unwrap();
    let mpsk = validate_against_analytic(&mpsk_sim).unwrap();
    let elapsed = t0.elapsed().as_secs_f64();
    report(
        "criterion 7 (mpsk signal)",
        mpsk.pass && elapsed < 60.0,
        &format!("max |z| = {:.2}, total runtime {elapsed:.1}s (<60s)", mpsk.max_abs_z),
    );
}

#[test]
fn criterion_8_round_trip_inversions() {
    let _guard = run_alone();
    // q / q_inv round trip
    let mut worst_q = 0.0f64;
    let mut p = 1e-8;
    while p < 0.5 {
        for v in [p, 1.0 - p] {
            let back = normal_tail::q(normal_tail::q_inv(v).unwrap()).unwrap().get();
            worst_q = worst_q.max((back - v).abs() / v.max(1e-3));
        }
        p *= 1.13;
    }
    report(
        "criterion 8 (tail round trip)",
        worst_q <= 1e-10,
        &format!("max scaled defect {worst_q:.2e} (<=1e-10)"),
    );

    let envs = EnvSampler::new(0x5eed_0008).pairs(5);
    let reference = ScenarioConfig::default().senv;
    let mut all: Vec<SensingEnv> = envs.iter().map(|(s, _)| *s).collect();
    all.push(reference);

    // threshold round trip
    let mut worst_thresh = 0.0f64;
    for senv in &all {
        for n in [10.0, 1e3, 1e6] {
            let eps = spectrum_sensing::threshold_for_target(n, senv).unwrap();
            let pd = spectrum_sensing::p_d_of(eps, n, senv).unwrap().get();
            worst_thresh = worst_thresh.max((pd - (1.0 - senv.p_e())).abs());
        }
    }
    report(
        "criterion 8 (threshold round trip)",
        worst_thresh <= 1e-9,
        &format!("max |p_d - (1 - p_e)| = {worst_thresh:.2e} (<=1e-9)"),
    );

    // p_t <-> N inversion across the sensing range
    let mut worst_inv = 0.0f64;
    for senv in &all {
        let lb = spectrum_sensing::p_t_lower_bound(senv);
        let hi = senv.p_h0();
        let delta = (hi - lb) * 1e-4;
        for i in 0..512 {
            let p = lb + delta + (hi - lb - 2.0 * delta) * i as f64 / 511.0;
            let back = spectrum_sensing::p_t_of_n(
                spectrum_sensing::n_of_p_t(p, senv).unwrap(),
                senv,
            )
            .unwrap()
            .get();
            worst_inv = worst_inv.max((back - p).abs() / p);
        }
    }
    report(
        "criterion 8 (p_t inversion)",
        worst_inv <= 1e-8,
        &format!("max relative defect {worst_inv:.2e} (<=1e-8)"),
    );
}
