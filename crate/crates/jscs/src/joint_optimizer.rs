//! Total node power over the transmission probability, and its minimizer.
//!
//! The effective transmission probability `p_t` is the one knob coupling
//! the two power sinks: channel sensing gets cheaper as `p_t` drops (fewer
//! detector samples needed) while source reporting gets cheaper as `p_t`
//! rises (lower instantaneous rate). Their sum blows up at both ends of
//! `(0, p(H0))`, so a minimum always exists in the interior. On the
//! sub-interval where the false-alarm probability stays below 1/2
//! (equivalently `p_t > p(H0)/2`) the sum is convex and the minimum there
//! is unique; elsewhere a dense scan stands in for the convexity argument.
//!
//! The minimizer therefore runs a coarse bracketing grid, log-clustered
//! toward both boundaries to capture the blow-ups, then golden-section
//! refinement inside the winning cell. Grid evaluation happens in the log
//! domain so the `1/p_t` exponential near the left boundary orders
//! correctly instead of overflowing.

use rayon::prelude::*;

use crate::appos_model::{self, SourceEnv};
use crate::error::{Error, Result};
use crate::spectrum_sensing::{self, SensingEnv};

/// Whether an operating point needs any detector samples at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Below the sensing floor: the miss cap holds without sensing.
    NoSensing,
    /// Above the floor: the detector runs every slot.
    Sensing,
}

/// One fully evaluated operating point of the joint power model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    /// Effective transmission probability.
    pub p_t: f64,
    /// Detector samples per slot (real-valued).
    pub n_samples: f64,
    /// Channel-sensing power, watts.
    pub p_amos_w: f64,
    /// Source-reporting power, watts.
    pub p_appos_w: f64,
    /// Their sum, watts.
    pub p_total_w: f64,
    /// Sensing regime at this point.
    pub regime: Regime,
    /// Fraction of the total spent on sensing, in `[0, 1]`.
    pub amos_share: f64,
}

/// How the minimizer pinned down the reported point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    /// Interior bracket refined by golden-section search.
    GoldenSection,
    /// The grid minimum sat on the first or last cell, so only that cell
    /// was refined; the exhaustive grid itself is the guarantee.
    GridRefine,
}

/// Result of a minimization run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    /// The minimizing operating point.
    pub point: OperatingPoint,
    /// The grid cell that bracketed the minimum before refinement.
    pub bracket: (f64, f64),
    /// Golden-section iterations spent inside the bracket.
    pub iterations: u32,
    /// True when the bracket lay inside the `P_FA < 1/2` region and the
    /// local second-difference check passed.
    pub certified_convex: bool,
    /// Refinement strategy used.
    pub solver: Solver,
}

/// A point where a second central difference dipped below tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityViolation {
    pub p_t: f64,
    pub second_difference: f64,
    /// Local magnitude used to scale the tolerance.
    pub scale: f64,
}

/// Outcome of scanning the total power for convexity.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityReport {
    /// The `p_t` interval on which convexity is claimed and checked,
    /// `(p(H0)/2, p(H0))`.
    pub hypothesis_interval: (f64, f64),
    /// True iff no violations were found inside the hypothesis interval.
    pub certified: bool,
    /// Violations inside the hypothesis interval (empty when certified).
    pub violations_inside: Vec<ConvexityViolation>,
    /// Violations found below `p(H0)/2`, where nothing is claimed; reported
    /// for diagnosis only.
    pub violations_outside: Vec<ConvexityViolation>,
}

/// A published operating point to fit free parameters against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportedOptimum {
    /// Reported optimal transmission probability.
    pub p_t: f64,
    /// Reported minimal total power, watts.
    pub total_power_w: f64,
    /// Reported sensing share of the total, in `(0, 1)`.
    pub amos_share: f64,
}

/// Slot length and channel noise density recovered from a reported optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    /// Slot length T, seconds.
    pub slot_len: f64,
    /// Unilateral noise PSD N0, W/Hz.
    pub n0: f64,
    /// Detector samples implied at the reported point.
    pub n_samples_at_target: f64,
}

const RELATIVE_TOL: f64 = 1e-9;
const INV_GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Evaluate the full operating point at `p_t`.
pub fn p_total(p_t: f64, senv: &SensingEnv, aenv: &SourceEnv) -> Result<OperatingPoint> {
    let n_samples = spectrum_sensing::n_of_p_t(p_t, senv)?;
    let p_amos_w = spectrum_sensing::p_amos(p_t, senv)?;
    let p_appos_w = appos_model::p_appos(p_t, aenv, senv)?;
    let p_total_w = p_amos_w + p_appos_w;
    Ok(OperatingPoint {
        p_t,
        n_samples,
        p_amos_w,
        p_appos_w,
        p_total_w,
        regime: if n_samples == 0.0 {
            Regime::NoSensing
        } else {
            Regime::Sensing
        },
        amos_share: if p_total_w > 0.0 && p_total_w.is_finite() {
            p_amos_w / p_total_w
        } else {
            0.0
        },
    })
}

/// Natural log of the total power. Finite wherever the model is defined,
/// even where the linear value overflows.
pub fn p_total_ln(p_t: f64, senv: &SensingEnv, aenv: &SourceEnv) -> Result<f64> {
    let ln_amos = spectrum_sensing::p_amos(p_t, senv)?.ln();
    let ln_appos = appos_model::p_appos_ln(p_t, aenv, senv);
    Ok(log_add_exp(ln_amos, ln_appos))
}

/// Analytic derivative of the total power. At the exact regime boundary it
/// reports both one-sided values via [`Error::RegimeKink`]; they coincide,
/// because the sensing term fades in with zero slope.
pub fn p_total_deriv(p_t: f64, senv: &SensingEnv, aenv: &SourceEnv) -> Result<f64> {
    let d_appos = appos_model::p_appos_deriv(p_t, aenv, senv)?;
    let d_amos = spectrum_sensing::p_amos_deriv(p_t, senv)?;
    if p_t == spectrum_sensing::p_t_lower_bound(senv) {
        return Err(Error::RegimeKink {
            at: p_t,
            left: d_appos,
            right: d_appos + d_amos,
        });
    }
    Ok(d_amos + d_appos)
}

/// Scan the total power for convexity on the `P_FA < 1/2` sub-interval
/// `(p(H0)/2, p(H0))` with `grid_size` points, flagging any second central
/// difference below `-1e-9 · scale`. The region below `p(H0)/2` is scanned
/// too, but violations there only show up in the report.
pub fn certify_convexity(
    senv: &SensingEnv,
    aenv: &SourceEnv,
    grid_size: usize,
) -> Result<ConvexityReport> {
    if grid_size < 16 {
        return Err(Error::Domain(format!(
            "convexity grid needs at least 16 points, got {grid_size}"
        )));
    }
    let p_h0 = senv.p_h0();
    let mid = 0.5 * p_h0;
    let inside = second_diff_violations(senv, aenv, mid * (1.0 + 1e-9), p_h0 * (1.0 - 1e-4), grid_size)?;
    let outside = second_diff_violations(senv, aenv, p_h0 * 1e-3, mid * (1.0 - 1e-9), grid_size)?;
    Ok(ConvexityReport {
        hypothesis_interval: (mid, p_h0),
        certified: inside.is_empty(),
        violations_inside: inside,
        violations_outside: outside,
    })
}

fn second_diff_violations(
    senv: &SensingEnv,
    aenv: &SourceEnv,
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<Vec<ConvexityViolation>> {
    let xs: Vec<f64> = (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect();
    let vals = xs
        .par_iter()
        .map(|&p| Ok(p_total(p, senv, aenv)?.p_total_w))
        .collect::<Result<Vec<f64>>>()?;
    let mut violations = Vec::new();
    for i in 1..points - 1 {
        let d2 = vals[i - 1] - 2.0 * vals[i] + vals[i + 1];
        let scale = vals[i - 1].abs().max(vals[i].abs()).max(vals[i + 1].abs());
        if d2 < -RELATIVE_TOL * scale {
            violations.push(ConvexityViolation {
                p_t: xs[i],
                second_difference: d2,
                scale,
            });
        }
    }
    Ok(violations)
}

/// The bracketing grid used by [`minimize`]: `points` values of `p_t` in
/// `(0, p(H0))`, 90% uniform, 10% log-clustered within `1e-3 · p(H0)` of
/// each boundary (down to a `1e-12` relative offset). The sensing power
/// diverges at the right boundary only like `Q⁻¹(u)²`, with a `1/φ(Q⁻¹(u))`
/// slope, so the cluster has to reach deep before the blow-up dominates
/// every admissible reporting term on the grid's own steps.
pub fn search_grid(senv: &SensingEnv, points: usize) -> Vec<f64> {
    let p_h0 = senv.p_h0();
    let per_side = (points / 20).max(4);
    let middle = points - 2 * per_side;
    let mut grid = Vec::with_capacity(points);
    for i in 0..per_side {
        // relative offsets 1e-12 .. 1e-3, log-spaced
        let t = i as f64 / (per_side - 1) as f64;
        grid.push(p_h0 * 1e-12 * 10f64.powf(9.0 * t));
    }
    let lo = p_h0 * 1e-3;
    let hi = p_h0 * (1.0 - 1e-3);
    for j in 1..=middle {
        grid.push(lo + (hi - lo) * j as f64 / (middle + 1) as f64);
    }
    for i in 0..per_side {
        let t = (per_side - 1 - i) as f64 / (per_side - 1) as f64;
        grid.push(p_h0 * (1.0 - 1e-12 * 10f64.powf(9.0 * t)));
    }
    grid
}

/// Minimize the total power over `(0, p(H0))` with the default 512-point
/// bracketing grid. The reported `p_t` is within `tol_pt` of the true
/// minimizer.
pub fn minimize(senv: &SensingEnv, aenv: &SourceEnv, tol_pt: f64) -> Result<Optimum> {
    minimize_with_grid(senv, aenv, tol_pt, 512)
}

/// [`minimize`] with an explicit grid size (at least 64 points).
pub fn minimize_with_grid(
    senv: &SensingEnv,
    aenv: &SourceEnv,
    tol_pt: f64,
    grid_points: usize,
) -> Result<Optimum> {
    if !(tol_pt > 0.0 && tol_pt <= 1e-2) {
        return Err(Error::Domain(format!(
            "tol_pt must lie in (0, 1e-2], got {tol_pt}"
        )));
    }
    if grid_points < 64 {
        return Err(Error::Domain(format!(
            "bracketing grid needs at least 64 points, got {grid_points}"
        )));
    }

    let grid = search_grid(senv, grid_points);
    let vals = grid
        .par_iter()
        .map(|&p| p_total_ln(p, senv, aenv))
        .collect::<Result<Vec<f64>>>()?;

    let mut best_i = None;
    for (i, &v) in vals.iter().enumerate() {
        if v.is_finite() && best_i.is_none_or(|j| v < vals[j]) {
            best_i = Some(i);
        }
    }
    let i = best_i.ok_or_else(|| {
        Error::BracketFailure("no finite total power anywhere on the search grid".into())
    })?;

    let last = grid.len() - 1;
    let (lo_i, hi_i) = (i.saturating_sub(1), (i + 1).min(last));
    let solver = if i > 0 && i < last {
        Solver::GoldenSection
    } else {
        Solver::GridRefine
    };
    let bracket = (grid[lo_i], grid[hi_i]);

    // Refine well past tol_pt so the power value, not just the location,
    // is converged; golden section gains a digit every ~5 iterations.
    let f = |p: f64| p_total_ln(p, senv, aenv).unwrap_or(f64::INFINITY);
    let mut best = (grid[i], vals[i]);
    let iterations = golden_section(f, bracket.0, bracket.1, tol_pt * 0.05, &mut best);

    let point = p_total(best.0, senv, aenv)?;

    let in_region = bracket.0 >= 0.5 * senv.p_h0();
    let certified_convex = in_region
        && second_diff_violations(senv, aenv, bracket.0, bracket.1, 65)?.is_empty();

    Ok(Optimum {
        point,
        bracket,
        iterations,
        certified_convex,
        solver,
    })
}

fn golden_section<F: Fn(f64) -> f64>(
    f: F,
    mut a: f64,
    mut b: f64,
    tol: f64,
    best: &mut (f64, f64),
) -> u32 {
    let mut c = b - (b - a) * INV_GOLDEN;
    let mut d = a + (b - a) * INV_GOLDEN;
    let mut fc = f(c);
    let mut fd = f(d);
    let consider = |x: f64, fx: f64, best: &mut (f64, f64)| {
        if fx < best.1 {
            *best = (x, fx);
        }
    };
    consider(c, fc, best);
    consider(d, fd, best);
    let mut iterations = 0;
    while (b - a) > tol && iterations < 300 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * INV_GOLDEN;
            fc = f(c);
            consider(c, fc, best);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * INV_GOLDEN;
            fd = f(d);
            consider(d, fd, best);
        }
        iterations += 1;
    }
    iterations
}

/// Fit the two parameters the power model cannot observe directly — slot
/// length and channel noise density — to a reported optimal operating
/// point. The two equations decouple: the sensing share pins `T` through
/// the sample count at the reported `p_t`, and the remainder pins `N0`
/// through the reporting-power closed form. `aenv.n0()` is ignored.
pub fn calibrate(
    senv: &SensingEnv,
    aenv: &SourceEnv,
    reported: &ReportedOptimum,
) -> Result<Calibration> {
    if !(reported.total_power_w > 0.0 && reported.total_power_w.is_finite()) {
        return Err(Error::Domain(format!(
            "reported total power must be positive, got {}",
            reported.total_power_w
        )));
    }
    if !(reported.amos_share > 0.0 && reported.amos_share < 1.0) {
        return Err(Error::Domain(format!(
            "reported sensing share must lie in (0, 1), got {}",
            reported.amos_share
        )));
    }
    let n_star = spectrum_sensing::n_of_p_t(reported.p_t, senv)?;
    if n_star == 0.0 {
        return Err(Error::Domain(format!(
            "reported p_t = {} sits in the no-sensing regime; the sensing share cannot pin a slot length",
            reported.p_t
        )));
    }
    if senv.e_sample() <= 0.0 {
        return Err(Error::Domain(
            "calibration needs a positive per-sample energy".into(),
        ));
    }

    let amos_target = reported.amos_share * reported.total_power_w;
    let slot_len = n_star * senv.e_sample() / amos_target;

    let appos_target = (1.0 - reported.amos_share) * reported.total_power_w;
    let exponent =
        aenv.rate_base().ln() * aenv.symbol_rate() / (2.0 * aenv.bandwidth() * reported.p_t);
    let raw = reported.p_t + senv.p_e() * senv.p_h1();
    let n0 = appos_target / (raw * aenv.bandwidth() * exponent.exp_m1());

    Ok(Calibration {
        slot_len,
        n0,
        n_samples_at_target: n_star,
    })
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + (-(a - b).abs()).exp().ln_1p()
}
