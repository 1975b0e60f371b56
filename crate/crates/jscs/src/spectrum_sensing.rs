//! Energy-detection channel sensing and its average power cost.
//!
//! A node spends `N` detector samples per slot to decide whether the primary
//! user is on the air. Under the large-`N` Gaussian approximation of the
//! energy statistic the false-alarm and detection probabilities are plain
//! `Q`-function expressions, and fixing the miss-detection cap pins the
//! threshold, leaving `N` as the single sensing knob. Inverting the chain
//! gives the sensing power needed to reach a target effective transmission
//! probability `p_t`:
//!
//! ```text
//! N(p_t) = ((Q⁻¹(1 - p_t / p(H0)) - sqrt(2γ+1) Q⁻¹(1 - P_E)) / γ)²
//! P_sensing(p_t) = N(p_t) · E_sample / T
//! ```
//!
//! with `γ` the primary-signal SNR at the detector. Below a floor value of
//! `p_t` the miss cap is met without sensing at all and the power is 0; the
//! floor is exposed as [`p_t_lower_bound`]. `N` is kept real-valued so the
//! optimizer can differentiate through it; the Monte-Carlo layer rounds up
//! (more samples, fewer false alarms) when it needs an integer count.

use crate::error::{Error, Result};
use crate::normal_tail::{phi, q_inv_raw, q_raw, Probability};

/// Primary-user and detector environment. Immutable once built; all
/// operations on it are pure, so parallel sweeps are safe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingEnv {
    signal_power: f64,
    noise_power: f64,
    p_h0: f64,
    p_e: f64,
    e_sample: f64,
    slot_len: f64,
    // derived, cached at construction
    sensing_offset: f64,
    p_t_floor: f64,
}

/// Miss-detection cap a primary system is conventionally assumed to
/// tolerate; [`SensingEnv::new`] enforces it.
pub const DEFAULT_MISS_CAP: f64 = 0.1;

impl SensingEnv {
    /// Build an environment.
    ///
    /// * `signal_power` - primary-signal power σ_s² at the detector (linear).
    /// * `noise_power` - detector noise power σ_u² (linear).
    /// * `p_h0` - prior probability that the primary user is inactive.
    /// * `p_e` - miss-detection cap P_E = 1 - P_D; at most [`DEFAULT_MISS_CAP`]
    ///   here, see [`SensingEnv::with_miss_cap_override`] for larger values.
    /// * `e_sample` - energy per detector sample, joules.
    /// * `slot_len` - slot length T, seconds.
    pub fn new(
        signal_power: f64,
        noise_power: f64,
        p_h0: f64,
        p_e: f64,
        e_sample: f64,
        slot_len: f64,
    ) -> Result<Self> {
        if p_e > DEFAULT_MISS_CAP {
            return Err(Error::Domain(format!(
                "miss-detection cap {p_e} exceeds the conventional limit {DEFAULT_MISS_CAP}; \
                 use with_miss_cap_override() if that is intended"
            )));
        }
        Self::build(signal_power, noise_power, p_h0, p_e, e_sample, slot_len)
    }

    /// Same as [`SensingEnv::new`] but replaces the miss cap without the
    /// conventional-limit check. Still requires `0 < p_e < 1`.
    pub fn with_miss_cap_override(self, p_e: f64) -> Result<Self> {
        Self::build(
            self.signal_power,
            self.noise_power,
            self.p_h0,
            p_e,
            self.e_sample,
            self.slot_len,
        )
    }

    fn build(
        signal_power: f64,
        noise_power: f64,
        p_h0: f64,
        p_e: f64,
        e_sample: f64,
        slot_len: f64,
    ) -> Result<Self> {
        let positive = |name: &str, v: f64| -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("signal_power", signal_power)?;
        positive("noise_power", noise_power)?;
        positive("slot_len", slot_len)?;
        if !(e_sample.is_finite() && e_sample >= 0.0) {
            return Err(Error::Domain(format!(
                "e_sample must be nonnegative and finite, got {e_sample}"
            )));
        }
        for (name, v) in [("p_h0", p_h0), ("p_e", p_e)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Domain(format!(
                    "{name} must lie strictly inside (0, 1), got {v}"
                )));
            }
        }
        let snr = signal_power / noise_power;
        let sensing_offset = (2.0 * snr + 1.0).sqrt() * q_inv_raw(1.0 - p_e);
        let p_t_floor = (1.0 - q_raw(sensing_offset)) * p_h0;
        Ok(Self {
            signal_power,
            noise_power,
            p_h0,
            p_e,
            e_sample,
            slot_len,
            sensing_offset,
            p_t_floor,
        })
    }

    pub fn signal_power(&self) -> f64 {
        self.signal_power
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    /// Primary-signal SNR at the detector, `γ = σ_s² / σ_u²` (linear).
    pub fn snr(&self) -> f64 {
        self.signal_power / self.noise_power
    }

    pub fn p_h0(&self) -> f64 {
        self.p_h0
    }

    /// Primary-user activity prior, derived as `1 - p(H0)`.
    pub fn p_h1(&self) -> f64 {
        1.0 - self.p_h0
    }

    pub fn p_e(&self) -> f64 {
        self.p_e
    }

    pub fn e_sample(&self) -> f64 {
        self.e_sample
    }

    pub fn slot_len(&self) -> f64 {
        self.slot_len
    }
}

/// Gaussian approximation of the energy statistic `T(y)` under both
/// hypotheses for a given sample count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorStatistics {
    /// Mean under H0 (noise only): `σ_u²`.
    pub mu_h0: f64,
    /// Variance under H0: `σ_u⁴ / N`.
    pub sigma_sq_h0: f64,
    /// Mean under H1 (primary active): `σ_u² + σ_s²`.
    pub mu_h1: f64,
    /// Variance under H1: `σ_u⁴ (2γ + 1) / N`.
    pub sigma_sq_h1: f64,
}

impl DetectorStatistics {
    /// Probability that the statistic exceeds `threshold` under H0
    /// (the false-alarm probability of the Gaussian model).
    pub fn exceed_h0(&self, threshold: f64) -> Probability {
        Probability::from_math(q_raw((threshold - self.mu_h0) / self.sigma_sq_h0.sqrt()))
    }

    /// Probability that the statistic exceeds `threshold` under H1
    /// (the detection probability of the Gaussian model).
    pub fn exceed_h1(&self, threshold: f64) -> Probability {
        Probability::from_math(q_raw((threshold - self.mu_h1) / self.sigma_sq_h1.sqrt()))
    }
}

/// Mean and variance of the detector statistic for `n` samples.
pub fn detector_statistics(n: f64, env: &SensingEnv) -> Result<DetectorStatistics> {
    require_positive_n(n)?;
    let nu = env.noise_power;
    let stats = DetectorStatistics {
        mu_h0: nu,
        sigma_sq_h0: nu * nu / n,
        mu_h1: nu + env.signal_power,
        sigma_sq_h1: nu * nu * (2.0 * env.snr() + 1.0) / n,
    };
    debug_assert!(stats.mu_h1 > stats.mu_h0);
    Ok(stats)
}

/// A fully resolved sensing design for one sample count: the threshold
/// pinned by the miss cap and every derived probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingDesign {
    /// Sample count, real-valued.
    pub n_samples: f64,
    /// Decision threshold ε on the energy statistic.
    pub threshold: f64,
    /// False-alarm probability at that threshold.
    pub p_fa: Probability,
    /// Detection probability at that threshold (equals `1 - P_E` by
    /// construction, up to rounding).
    pub p_d: Probability,
    /// Probability the node decides it may transmit, `(1-P_FA)p(H0) + P_E p(H1)`.
    pub p_transmit_raw: Probability,
    /// Interference-free share of the above, `(1-P_FA)p(H0)`.
    pub p_transmit_eff: Probability,
    /// Collision probability `P_E · p(H1)`.
    pub p_collision: Probability,
}

/// False-alarm probability for an explicit threshold and sample count:
/// `Q((ε/σ_u² - 1)·√n)`.
pub fn p_fa_of(threshold: f64, n: f64, env: &SensingEnv) -> Result<Probability> {
    require_positive_n(n)?;
    let arg = (threshold / env.noise_power - 1.0) * n.sqrt();
    Ok(Probability::from_math(q_raw(arg)))
}

/// Detection probability for an explicit threshold and sample count:
/// `Q(((ε - σ_s²)/σ_u² - 1)·√(n/(2γ+1)))`.
pub fn p_d_of(threshold: f64, n: f64, env: &SensingEnv) -> Result<Probability> {
    require_positive_n(n)?;
    let arg = ((threshold - env.signal_power) / env.noise_power - 1.0)
        * (n / (2.0 * env.snr() + 1.0)).sqrt();
    Ok(Probability::from_math(q_raw(arg)))
}

/// The threshold that makes the detection probability exactly `1 - P_E`
/// for `n` samples: `ε = σ_u²(1 + Q⁻¹(1-P_E)·√((2γ+1)/n)) + σ_s²`.
pub fn threshold_for_target(n: f64, env: &SensingEnv) -> Result<f64> {
    require_positive_n(n)?;
    let snr = env.snr();
    let scale = ((2.0 * snr + 1.0) / n).sqrt();
    Ok(env.noise_power * (1.0 + q_inv_raw(1.0 - env.p_e) * scale) + env.signal_power)
}

/// False-alarm probability when the threshold is pinned by the miss cap,
/// as a function of the sample count alone: `Q(sqrt(2γ+1)·Q⁻¹(1-P_E) + √n·γ)`.
/// Non-increasing in `n`; `n = 0` gives the no-sensing false-alarm floor.
pub fn p_fa_given_n(n: f64, env: &SensingEnv) -> Result<Probability> {
    require_nonnegative_n(n)?;
    Ok(Probability::from_math(q_raw(
        env.sensing_offset + n.sqrt() * env.snr(),
    )))
}

/// Effective transmission probability for `n` samples,
/// `p_t = (1 - P_FA(n)) · p(H0)`. Strictly increasing in `n`, approaching
/// `p(H0)` as `n → ∞`.
pub fn p_t_of_n(n: f64, env: &SensingEnv) -> Result<Probability> {
    let p_fa = p_fa_given_n(n, env)?;
    Ok(Probability::from_math((1.0 - p_fa.get()) * env.p_h0))
}

/// Largest `p_t` reachable with zero sensing: below this value the miss cap
/// is satisfied without any detector samples and the sensing power is 0.
pub fn p_t_lower_bound(env: &SensingEnv) -> f64 {
    env.p_t_floor
}

/// Sample count needed for an effective transmission probability `p_t`.
/// Returns 0 on the no-sensing sub-range `p_t <= p_t_lower_bound`;
/// `p_t >= p(H0)` is unreachable and rejected.
pub fn n_of_p_t(p_t: f64, env: &SensingEnv) -> Result<f64> {
    if p_t.is_nan() || p_t <= 0.0 {
        return Err(Error::Domain(format!("p_t must be positive, got {p_t}")));
    }
    if p_t >= env.p_h0 {
        return Err(Error::Domain(format!(
            "p_t = {p_t} is unreachable: it must stay below p(H0) = {}",
            env.p_h0
        )));
    }
    if p_t <= env.p_t_floor {
        return Ok(0.0);
    }
    let root = (q_inv_raw(1.0 - p_t / env.p_h0) - env.sensing_offset) / env.snr();
    Ok(root * root)
}

/// Average sensing power at `p_t`, in watts: `N(p_t) · E_sample / T`,
/// exactly 0 on the no-sensing sub-range.
pub fn p_amos(p_t: f64, env: &SensingEnv) -> Result<f64> {
    if !(p_t > 0.0 && p_t < env.p_h0) {
        return Err(Error::Domain(format!(
            "p_t = {p_t} outside the open interval (0, {})",
            env.p_h0
        )));
    }
    Ok(n_of_p_t(p_t, env)? * env.e_sample / env.slot_len)
}

/// Analytic derivative of [`p_amos`] with respect to `p_t`. Zero on the
/// no-sensing sub-range, fading in continuously at the boundary and
/// diverging to `+∞` as `p_t → p(H0)⁻`.
pub fn p_amos_deriv(p_t: f64, env: &SensingEnv) -> Result<f64> {
    if !(p_t > 0.0 && p_t < env.p_h0) {
        return Err(Error::Domain(format!(
            "p_t = {p_t} outside the open interval (0, {})",
            env.p_h0
        )));
    }
    if p_t <= env.p_t_floor {
        return Ok(0.0);
    }
    let snr = env.snr();
    let f = q_inv_raw(1.0 - p_t / env.p_h0);
    // dN/dp_t = 2 (f - a) / γ² · f', with f' = 1 / (p(H0) φ(f)).
    let dn = 2.0 * (f - env.sensing_offset) / (snr * snr * env.p_h0 * phi(f));
    Ok(dn * env.e_sample / env.slot_len)
}

/// Resolve the complete design for a given sample count.
pub fn design_for_n(n: f64, env: &SensingEnv) -> Result<SensingDesign> {
    let threshold = threshold_for_target(n, env)?;
    let p_fa = p_fa_of(threshold, n, env)?;
    let p_d = p_d_of(threshold, n, env)?;
    let p_eff = (1.0 - p_fa.get()) * env.p_h0;
    let p_coll = (1.0 - p_d.get()) * env.p_h1();
    Ok(SensingDesign {
        n_samples: n,
        threshold,
        p_fa,
        p_d,
        p_transmit_raw: Probability::from_math(p_eff + p_coll),
        p_transmit_eff: Probability::from_math(p_eff),
        p_collision: Probability::from_math(p_coll),
    })
}

/// Resolve the design that reaches a target effective transmission
/// probability (sample count from [`n_of_p_t`], threshold from the miss cap).
pub fn design_for_p_t(p_t: f64, env: &SensingEnv) -> Result<SensingDesign> {
    let n = n_of_p_t(p_t, env)?;
    if n == 0.0 {
        return Err(Error::Domain(format!(
            "p_t = {p_t} lies in the no-sensing regime (floor {}); there is no detector design",
            env.p_t_floor
        )));
    }
    design_for_n(n, env)
}

fn require_positive_n(n: f64) -> Result<()> {
    if n.is_finite() && n > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("sample count must be positive, got {n}")))
    }
}

fn require_nonnegative_n(n: f64) -> Result<()> {
    if n.is_finite() && n >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("sample count must be nonnegative, got {n}")))
    }
}
