//! Distortion-bounded source reporting and its average power cost.
//!
//! `K` nodes observe one Gaussian source through independent Gaussian
//! observation noise and report compressed observations to an access point
//! that must reconstruct the source within mean-square distortion `D`. The
//! symmetric many-observer sum rate for that task is
//!
//! ```text
//! R_source = (L/2) · log2(C),
//! C = (σ_S²/D)^(1/K) / (1 - (σ_W²/K)(1/D - 1/σ_S²))
//! ```
//!
//! For non-Gaussian sources of the same variance this form is the outer
//! bound, i.e. the worst case, so it is used unchanged. Transmission is
//! only possible in the fraction `p_t` of slots the channel-sensing side
//! clears, so the channel code must run at `R_source / p_t`, and the
//! AWGN energy-per-bit cost of that rate gives an average reporting power
//! that *falls* as `p_t` grows: sparse transmission windows force a high
//! instantaneous rate, and rate is exponentially expensive.

use crate::error::{Error, Result};
use crate::spectrum_sensing::SensingEnv;

/// Application-source and reporting-channel environment. Immutable and
/// feasibility-checked at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceEnv {
    source_var: f64,
    obs_noise_var: f64,
    k_nodes: u32,
    symbol_rate: f64,
    distortion: f64,
    bandwidth: f64,
    n0: f64,
    // derived, cached at construction
    rate_base: f64,
    ln_rate_base: f64,
}

impl SourceEnv {
    /// Build an environment.
    ///
    /// * `source_var` - source variance σ_S².
    /// * `obs_noise_var` - per-node observation-noise variance σ_W².
    /// * `k_nodes` - observer count K, at least 1.
    /// * `symbol_rate` - source symbols per second L.
    /// * `distortion` - reconstruction bound D, `0 < D < σ_S²`.
    /// * `bandwidth` - channel bandwidth W in Hz.
    /// * `n0` - unilateral noise power spectral density, W/Hz.
    ///
    /// Fails with [`Error::InfeasibleDistortion`] when `D` is below what
    /// `K` observers at this noise level can ever deliver.
    pub fn new(
        source_var: f64,
        obs_noise_var: f64,
        k_nodes: u32,
        symbol_rate: f64,
        distortion: f64,
        bandwidth: f64,
        n0: f64,
    ) -> Result<Self> {
        let positive = |name: &str, v: f64| -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("source_var", source_var)?;
        positive("symbol_rate", symbol_rate)?;
        positive("bandwidth", bandwidth)?;
        positive("n0", n0)?;
        if !(obs_noise_var.is_finite() && obs_noise_var >= 0.0) {
            return Err(Error::Domain(format!(
                "obs_noise_var must be nonnegative and finite, got {obs_noise_var}"
            )));
        }
        if k_nodes < 1 {
            return Err(Error::Domain("k_nodes must be at least 1".into()));
        }
        if !(distortion > 0.0 && distortion < source_var) {
            return Err(Error::Domain(format!(
                "distortion must satisfy 0 < D < source variance {source_var}, got {distortion}"
            )));
        }
        let k = f64::from(k_nodes);
        let denom = 1.0 - (obs_noise_var / k) * (1.0 / distortion - 1.0 / source_var);
        if denom <= 0.0 {
            // smallest D with positive denominator
            let min_feasible = source_var * obs_noise_var / (k * source_var + obs_noise_var);
            return Err(Error::InfeasibleDistortion {
                given: distortion,
                min_feasible,
            });
        }
        let rate_base = (source_var / distortion).powf(1.0 / k) / denom;
        debug_assert!(rate_base > 1.0);
        Ok(Self {
            source_var,
            obs_noise_var,
            k_nodes,
            symbol_rate,
            distortion,
            bandwidth,
            n0,
            rate_base,
            ln_rate_base: rate_base.ln(),
        })
    }

    pub fn source_var(&self) -> f64 {
        self.source_var
    }

    pub fn obs_noise_var(&self) -> f64 {
        self.obs_noise_var
    }

    pub fn k_nodes(&self) -> u32 {
        self.k_nodes
    }

    pub fn symbol_rate(&self) -> f64 {
        self.symbol_rate
    }

    pub fn distortion(&self) -> f64 {
        self.distortion
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    /// The argument `C` of the log in the sum-rate expression; strictly
    /// greater than 1 for every feasible environment.
    pub fn rate_base(&self) -> f64 {
        self.rate_base
    }

    /// Smallest distortion any coding rate can reach with this observer
    /// count and observation noise.
    pub fn min_feasible_distortion(&self) -> f64 {
        let k = f64::from(self.k_nodes);
        self.source_var * self.obs_noise_var / (k * self.source_var + self.obs_noise_var)
    }

    /// Exponent scale `L / (2W)`: the reporting-power exponent is
    /// `ln(C) · L / (2 p_t W)`.
    fn exponent_scale(&self) -> f64 {
        self.symbol_rate / (2.0 * self.bandwidth)
    }
}

/// Required source coding rate, with the cached log argument alongside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceRate {
    /// Sum rate in bits per second.
    pub bits_per_second: f64,
    /// The log argument `C` (see [`SourceEnv::rate_base`]).
    pub rate_base: f64,
}

/// Source rate and the inflated channel rate that compensates for only
/// transmitting in a `p_t` fraction of slots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePair {
    /// Source coding rate, bits/s.
    pub r_source: f64,
    /// Channel coding rate `r_source / p_t`, bits/s.
    pub r_channel: f64,
}

/// Sum rate needed to hit the distortion bound, `(L/2) log2(C)`.
pub fn ceo_rate(env: &SourceEnv) -> Result<SourceRate> {
    // Feasibility is established at construction; keep the closed form
    // honest against the cached value anyway.
    debug_assert!(env.rate_base > 1.0);
    Ok(SourceRate {
        bits_per_second: 0.5 * env.symbol_rate * env.ln_rate_base / std::f64::consts::LN_2,
        rate_base: env.rate_base,
    })
}

/// Source and channel coding rates for a transmission probability.
pub fn rate_pair(p_t: f64, env: &SourceEnv) -> Result<RatePair> {
    require_p_t(p_t)?;
    let r_source = ceo_rate(env)?.bits_per_second;
    Ok(RatePair {
        r_source,
        r_channel: r_source / p_t,
    })
}

/// AWGN energy needed to deliver one bit at channel rate `r_channel`:
/// `N0 · W · (2^(R/W) - 1) / R`. Strictly increasing in `R`, approaching
/// the Shannon floor `N0 · ln 2` as `R → 0⁺`.
pub fn energy_per_bit(r_channel: f64, env: &SourceEnv) -> Result<f64> {
    if !(r_channel.is_finite() && r_channel > 0.0) {
        return Err(Error::Domain(format!(
            "channel rate must be positive, got {r_channel}"
        )));
    }
    let x = r_channel / env.bandwidth * std::f64::consts::LN_2;
    Ok(env.n0 * env.bandwidth * x.exp_m1() / r_channel)
}

/// Average reporting power at `p_t`, in watts:
/// `(p_t + P_E·p(H1)) · N0 · W · (C^(L/(2 p_t W)) - 1)`.
///
/// The leading factor is the raw transmit probability: collision slots
/// burn transmit energy too, even though they deliver nothing.
pub fn p_appos(p_t: f64, env: &SourceEnv, sensing: &SensingEnv) -> Result<f64> {
    require_p_t(p_t)?;
    let a = env.ln_rate_base * env.exponent_scale() / p_t;
    Ok((p_t + collision_term(sensing)) * env.n0 * env.bandwidth * a.exp_m1())
}

/// Natural log of [`p_appos`], exact even where the linear value overflows
/// (the exponent grows like `1/p_t`). Used by the optimizer near `p_t → 0`.
pub(crate) fn p_appos_ln(p_t: f64, env: &SourceEnv, sensing: &SensingEnv) -> f64 {
    let a = env.ln_rate_base * env.exponent_scale() / p_t;
    (p_t + collision_term(sensing)).ln() + (env.n0 * env.bandwidth).ln() + ln_expm1(a)
}

/// Analytic derivative of [`p_appos`] with respect to `p_t`:
///
/// ```text
/// N0·W·( C^(c/p_t) · (1 - c·ln(C)·(p_t + P_E p(H1)) / p_t²) - 1 ),   c = L/(2W)
/// ```
///
/// Negative everywhere on `(0, 1]` (raising `p_t` always cheapens
/// reporting), diverging to `-∞` as `p_t → 0⁺` and flattening toward 0 for
/// large `p_t`.
pub fn p_appos_deriv(p_t: f64, env: &SourceEnv, sensing: &SensingEnv) -> Result<f64> {
    require_p_t(p_t)?;
    let c = env.exponent_scale();
    let ln_c = env.ln_rate_base;
    let a = ln_c * c / p_t;
    let inner = 1.0 - c * ln_c * (p_t + collision_term(sensing)) / (p_t * p_t);
    Ok(env.n0 * env.bandwidth * (a.exp() * inner - 1.0))
}

fn collision_term(sensing: &SensingEnv) -> f64 {
    sensing.p_e() * sensing.p_h1()
}

fn require_p_t(p_t: f64) -> Result<()> {
    if p_t > 0.0 && p_t <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "transmission probability must lie in (0, 1], got {p_t}"
        )))
    }
}

/// `ln(e^a - 1)` without overflow for large `a`.
fn ln_expm1(a: f64) -> f64 {
    if a <= 36.0 {
        a.exp_m1().ln()
    } else {
        a + (-(-a).exp()).ln_1p()
    }
}
