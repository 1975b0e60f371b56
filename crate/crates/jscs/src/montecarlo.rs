//! Slotted Monte-Carlo simulation of the sensing scheme.
//!
//! Each slot independently draws the primary-user state, synthesizes `N`
//! complex baseband samples (noise, plus the primary signal when active),
//! runs the average-energy detector against the threshold pinned by the
//! miss cap, and books the outcome. Sensing occupies zero simulated time;
//! only its energy would be charged, and this module tracks rates, not
//! energy. The empirical detection, false-alarm, transmission and
//! collision rates validate the closed forms in [`crate::spectrum_sensing`]
//! from a path that shares nothing with them but the threshold.
//!
//! Slot `i` draws from stream `i` of a counter-based generator, so runs are
//! bit-reproducible for a given `(config, seed)` no matter how many threads
//! participate.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::CounterRng;
use crate::spectrum_sensing::{self, SensingEnv};

/// Primary-signal waveform model used under the active hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalModel {
    /// Circularly symmetric complex Gaussian samples.
    ComplexGaussian,
    /// Constant-modulus symbols on an `m`-point phase constellation,
    /// one uniformly drawn symbol per sample.
    Mpsk(u32),
}

/// A complete, validated simulation setup.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub senv: SensingEnv,
    pub n_slots: u64,
    /// Detector samples per slot; the analytic real-valued count rounds up.
    pub n_samples: u64,
    pub seed: u64,
    pub signal_model: SignalModel,
}

impl SimConfig {
    pub fn new(
        senv: SensingEnv,
        n_slots: u64,
        n_samples: u64,
        seed: u64,
        signal_model: SignalModel,
    ) -> Result<Self> {
        if n_slots < 1 {
            return Err(Error::InvalidConfig("n_slots must be at least 1".into()));
        }
        if n_samples < 1 {
            return Err(Error::InvalidConfig(
                "n_samples must be at least 1; a zero-sample detector cannot sense".into(),
            ));
        }
        if let SignalModel::Mpsk(m) = signal_model {
            if m < 1 {
                return Err(Error::InvalidConfig("constellation order must be >= 1".into()));
            }
        }
        Ok(Self {
            senv,
            n_slots,
            n_samples,
            seed,
            signal_model,
        })
    }

    /// Setup targeting an effective transmission probability: the sample
    /// count is the analytic value rounded up (more samples mean fewer
    /// false alarms, so rounding is on the safe side).
    pub fn for_transmit_probability(
        senv: SensingEnv,
        p_t: f64,
        n_slots: u64,
        seed: u64,
        signal_model: SignalModel,
    ) -> Result<Self> {
        let n = spectrum_sensing::n_of_p_t(p_t, &senv)?;
        if n == 0.0 {
            return Err(Error::InvalidConfig(format!(
                "p_t = {p_t} is below the no-sensing floor {}; nothing to simulate — \
                 pick a p_t above the floor",
                spectrum_sensing::p_t_lower_bound(&senv)
            )));
        }
        Self::new(senv, n_slots, n.ceil() as u64, seed, signal_model)
    }
}

/// What one slot did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotOutcome {
    /// Primary user active this slot.
    pub pu_active: bool,
    /// Detector declared the channel busy.
    pub busy_declared: bool,
    /// Value of the average-energy statistic.
    pub statistic: f64,
}

/// Per-slot outcomes of one run, in slot order.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotTrace {
    pub threshold: f64,
    pub outcomes: Vec<SlotOutcome>,
}

/// An empirical rate with its 95% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    pub successes: u64,
    pub trials: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl RateEstimate {
    pub fn contains(&self, p: f64) -> bool {
        (self.ci_low..=self.ci_high).contains(&p)
    }
}

/// Sample mean and (population) variance of the detector statistic over
/// the slots of one hypothesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleMoments {
    pub count: u64,
    pub mean: f64,
    pub variance: f64,
}

/// Aggregated results of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct McStats {
    pub threshold: f64,
    pub n_slots: u64,
    pub slots_h0: u64,
    pub slots_h1: u64,
    /// Detection rate, conditioned on active slots.
    pub p_d: RateEstimate,
    /// False-alarm rate, conditioned on idle slots.
    pub p_fa: RateEstimate,
    /// Interference-free transmission rate over all slots.
    pub p_t: RateEstimate,
    /// Collision rate (transmitting while the primary is active) over all slots.
    pub p_collision: RateEstimate,
    pub statistic_h0: SampleMoments,
    pub statistic_h1: SampleMoments,
}

/// One empirical-vs-analytic comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticCheck {
    pub name: &'static str,
    pub analytic: f64,
    pub empirical: f64,
    pub std_err: f64,
    pub z: f64,
}

/// Z-score comparison of a run against the closed forms.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<AnalyticCheck>,
    pub max_abs_z: f64,
    /// True when every `|z|` is at most 4.
    pub pass: bool,
}

/// Simulate and keep the per-slot outcomes.
pub fn run_trace(config: &SimConfig) -> Result<SlotTrace> {
    let n = config.n_samples as f64;
    let threshold = spectrum_sensing::threshold_for_target(n, &config.senv)?;
    let outcomes: Vec<SlotOutcome> = (0..config.n_slots)
        .into_par_iter()
        .map(|slot| simulate_slot(config, threshold, slot))
        .collect();
    Ok(SlotTrace {
        threshold,
        outcomes,
    })
}

/// Simulate and aggregate.
pub fn run(config: &SimConfig) -> Result<McStats> {
    Ok(aggregate(config, &run_trace(config)?))
}

/// Run, then compare the empirical detection, false-alarm and transmission
/// rates against the closed forms at the simulated (integer) sample count.
/// Needs at least 10⁴ slots for the normal-approximation z-scores to mean
/// anything.
pub fn validate_against_analytic(config: &SimConfig) -> Result<ValidationReport> {
    if config.n_slots < 10_000 {
        return Err(Error::Domain(format!(
            "z-score validation needs at least 10000 slots, got {}",
            config.n_slots
        )));
    }
    let stats = run(config)?;
    let n = config.n_samples as f64;
    let threshold = spectrum_sensing::threshold_for_target(n, &config.senv)?;
    let p_d = spectrum_sensing::p_d_of(threshold, n, &config.senv)?.get();
    let p_fa = spectrum_sensing::p_fa_of(threshold, n, &config.senv)?.get();
    let p_t = (1.0 - p_fa) * config.senv.p_h0();

    let checks = vec![
        z_check("p_d", p_d, &stats.p_d),
        z_check("p_fa", p_fa, &stats.p_fa),
        z_check("p_t", p_t, &stats.p_t),
    ];
    let max_abs_z = checks.iter().map(|c| c.z.abs()).fold(0.0, f64::max);
    Ok(ValidationReport {
        checks,
        max_abs_z,
        pass: max_abs_z <= 4.0,
    })
}

fn z_check(name: &'static str, analytic: f64, emp: &RateEstimate) -> AnalyticCheck {
    let std_err = (analytic * (1.0 - analytic) / emp.trials as f64).sqrt();
    AnalyticCheck {
        name,
        analytic,
        empirical: emp.rate,
        std_err,
        z: (emp.rate - analytic) / std_err,
    }
}

fn simulate_slot(config: &SimConfig, threshold: f64, slot: u64) -> SlotOutcome {
    let env = &config.senv;
    let mut rng = CounterRng::new(config.seed, slot);
    let pu_active = rng.next_f64() < env.p_h1();

    // per-quadrature standard deviations
    let noise_scale = (env.noise_power() * 0.5).sqrt();
    let gaussian_signal_scale = (env.signal_power() * 0.5).sqrt();
    let mpsk_amplitude = env.signal_power().sqrt();

    let mut energy = 0.0f64;
    for _ in 0..config.n_samples {
        let (z0, z1) = rng.standard_normal_pair();
        let mut re = z0 * noise_scale;
        let mut im = z1 * noise_scale;
        if pu_active {
            match config.signal_model {
                SignalModel::ComplexGaussian => {
                    let (w0, w1) = rng.standard_normal_pair();
                    re += w0 * gaussian_signal_scale;
                    im += w1 * gaussian_signal_scale;
                }
                SignalModel::Mpsk(m) => {
                    let k = rng.next_index(u64::from(m));
                    let phase = std::f64::consts::TAU * k as f64 / f64::from(m);
                    let (s, c) = phase.sin_cos();
                    re += mpsk_amplitude * c;
                    im += mpsk_amplitude * s;
                }
            }
        }
        energy += re * re + im * im;
    }
    let statistic = energy / config.n_samples as f64;
    SlotOutcome {
        pu_active,
        busy_declared: statistic >= threshold,
        statistic,
    }
}

fn aggregate(config: &SimConfig, trace: &SlotTrace) -> McStats {
    let mut slots_h1 = 0u64;
    let mut detections = 0u64;
    let mut false_alarms = 0u64;
    let mut clean_transmits = 0u64;
    let mut collisions = 0u64;
    let mut mom_h0 = Welford::default();
    let mut mom_h1 = Welford::default();

    for o in &trace.outcomes {
        if o.pu_active {
            slots_h1 += 1;
            detections += u64::from(o.busy_declared);
            collisions += u64::from(!o.busy_declared);
            mom_h1.push(o.statistic);
        } else {
            false_alarms += u64::from(o.busy_declared);
            clean_transmits += u64::from(!o.busy_declared);
            mom_h0.push(o.statistic);
        }
    }
    let n_slots = config.n_slots;
    let slots_h0 = n_slots - slots_h1;
    McStats {
        threshold: trace.threshold,
        n_slots,
        slots_h0,
        slots_h1,
        p_d: wilson(detections, slots_h1),
        p_fa: wilson(false_alarms, slots_h0),
        p_t: wilson(clean_transmits, n_slots),
        p_collision: wilson(collisions, n_slots),
        statistic_h0: mom_h0.finish(),
        statistic_h1: mom_h1.finish(),
    }
}

#[derive(Default)]
struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    fn finish(&self) -> SampleMoments {
        SampleMoments {
            count: self.count,
            mean: self.mean,
            variance: if self.count > 0 {
                self.m2 / self.count as f64
            } else {
                f64::NAN
            },
        }
    }
}

/// 95% Wilson score interval.
fn wilson(successes: u64, trials: u64) -> RateEstimate {
    if trials == 0 {
        return RateEstimate {
            successes,
            trials,
            rate: f64::NAN,
            ci_low: f64::NAN,
            ci_high: f64::NAN,
        };
    }
    const Z: f64 = 1.959_963_984_540_054;
    let t = trials as f64;
    let p = successes as f64 / t;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / t;
    let center = (p + z2 / (2.0 * t)) / denom;
    let half = Z * (p * (1.0 - p) / t + z2 / (4.0 * t * t)).sqrt() / denom;
    RateEstimate {
        successes,
        trials,
        rate: p,
        ci_low: (center - half).max(0.0),
        ci_high: (center + half).min(1.0),
    }
}

/// Wilson interval for an externally computed count.
pub fn wilson_interval(successes: u64, trials: u64) -> RateEstimate {
    wilson(successes, trials)
}
