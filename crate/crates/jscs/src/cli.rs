//! Command-line front end: `sweep`, `optimize`, `simulate`, `validate`.
//!
//! All numeric output is emitted as data (CSV or fixed-format text), never
//! plots; files are byte-stable for a fixed configuration and seed. Exit
//! codes: 0 success, 2 configuration error, 3 infeasible distortion,
//! 4 validation failure. The `JSCS_THREADS` environment variable caps the
//! worker-thread count.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::appos_model;
use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::finite_diff;
use crate::joint_optimizer::{self, Optimum, Regime, Solver};
use crate::montecarlo::{self, McStats, SignalModel, SimConfig, ValidationReport};
use crate::normal_tail;
use crate::spectrum_sensing;

/// Process exit codes of the `jscs` binary.
pub mod exit_code {
    pub const SUCCESS: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const INFEASIBLE: i32 = 3;
    pub const VALIDATION: i32 = 4;
}

#[derive(Debug, Parser)]
#[command(
    name = "jscs",
    version,
    about = "Joint sensing/reporting power model for cognitive-radio sensor nodes"
)]
pub struct Cli {
    /// Scenario config file; built-in reference scenario when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write power-vs-p_t curves as CSV, one file per SNR combination.
    Sweep {
        /// Which power curve to evaluate.
        #[arg(long, value_enum, default_value_t = SweepTarget::Total)]
        target: SweepTarget,
        /// Primary SNR values in dB (comma separated); config value if omitted.
        #[arg(long = "pu-snr-db", value_delimiter = ',', allow_hyphen_values = true)]
        pu_snr_db: Vec<f64>,
        /// Source observation SNR values in dB; config value if omitted.
        #[arg(long = "source-snr-db", value_delimiter = ',', allow_hyphen_values = true)]
        source_snr_db: Vec<f64>,
        /// Output CSV path (suffixed per combination when several are swept).
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Find the minimum-total-power operating point.
    Optimize {
        #[arg(long = "pu-snr-db", value_delimiter = ',', allow_hyphen_values = true)]
        pu_snr_db: Vec<f64>,
        #[arg(long = "source-snr-db", value_delimiter = ',', allow_hyphen_values = true)]
        source_snr_db: Vec<f64>,
        /// Location tolerance on the optimal p_t.
        #[arg(long = "tol-pt", default_value_t = 1e-4)]
        tol_pt: f64,
        /// Also write the result rows to a CSV file.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Run the slotted Monte-Carlo simulation and compare against the
    /// closed forms (exit 4 when a z-score exceeds 4).
    Simulate {
        /// Number of slots.
        #[arg(long, default_value_t = 100_000)]
        slots: u64,
        /// Generator seed.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Operating p_t; the scenario optimum when omitted.
        #[arg(long = "p-t", value_name = "REAL")]
        p_t: Option<f64>,
        /// Primary-signal waveform model.
        #[arg(long = "signal-model", value_enum, default_value_t = SignalModelArg::ComplexGaussian)]
        signal_model: SignalModelArg,
        /// Constellation order when the signal model is MPSK.
        #[arg(long = "mpsk-order", default_value_t = 4)]
        mpsk_order: u32,
        #[arg(long = "tol-pt", default_value_t = 1e-4)]
        tol_pt: f64,
    },
    /// Check the model's internal consistency: derivative finite
    /// differences, convexity certification, inversion round trips.
    Validate {},
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepTarget {
    /// Channel-sensing power.
    Amos,
    /// Source-reporting power.
    Appos,
    /// Their sum.
    Total,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignalModelArg {
    ComplexGaussian,
    Mpsk,
}

/// Entry point used by the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit_code::CONFIG } else { exit_code::SUCCESS };
        }
    };
    init_thread_pool();

    let config = match &cli.config {
        Some(path) => match ScenarioConfig::load(path) {
            Ok(c) => c,
            Err(e) => return report_error(&e),
        },
        None => ScenarioConfig::default(),
    };

    let outcome = match cli.command {
        Command::Sweep {
            target,
            pu_snr_db,
            source_snr_db,
            out,
        } => cmd_sweep(&config, target, &pu_snr_db, &source_snr_db, &out).map(|files| {
            for f in files {
                println!("wrote {}", f.display());
            }
            exit_code::SUCCESS
        }),
        Command::Optimize {
            pu_snr_db,
            source_snr_db,
            tol_pt,
            out,
        } => cmd_optimize(&config, &pu_snr_db, &source_snr_db, tol_pt, out.as_deref())
            .map(|_| exit_code::SUCCESS),
        Command::Simulate {
            slots,
            seed,
            p_t,
            signal_model,
            mpsk_order,
            tol_pt,
        } => {
            let model = match signal_model {
                SignalModelArg::ComplexGaussian => SignalModel::ComplexGaussian,
                SignalModelArg::Mpsk => SignalModel::Mpsk(mpsk_order),
            };
            cmd_simulate(&config, slots, seed, p_t, model, tol_pt).map(|outcome| {
                match outcome.validation {
                    Some(v) if !v.pass => exit_code::VALIDATION,
                    _ => exit_code::SUCCESS,
                }
            })
        }
        Command::Validate {} => cmd_validate(&config).map(|summary| {
            if summary.pass {
                exit_code::SUCCESS
            } else {
                exit_code::VALIDATION
            }
        }),
    };

    match outcome {
        Ok(code) => code,
        Err(e) => report_error(&e),
    }
}

fn report_error(e: &Error) -> i32 {
    eprintln!("error: {e}");
    match e {
        Error::InvalidConfig(_) | Error::Domain(_) => exit_code::CONFIG,
        Error::InfeasibleDistortion { .. } => exit_code::INFEASIBLE,
        _ => exit_code::VALIDATION,
    }
}

fn init_thread_pool() {
    if let Ok(raw) = std::env::var("JSCS_THREADS") {
        match raw.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring JSCS_THREADS={raw} (want a positive integer)"),
        }
    }
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

/// Evaluate one power curve per `(pu_snr_db, source_snr_db)` combination
/// over the configured grid and write each as a CSV file. Returns the
/// paths written.
pub fn cmd_sweep(
    config: &ScenarioConfig,
    target: SweepTarget,
    pu_snr_db: &[f64],
    source_snr_db: &[f64],
    out: &Path,
) -> Result<Vec<PathBuf>> {
    let pu_list = default_list(pu_snr_db, config.pu_snr_db());
    let src_list = default_list(source_snr_db, config.source_snr_db());
    let single = pu_list.len() == 1 && src_list.len() == 1;

    let mut written = Vec::new();
    for &pu in &pu_list {
        for &src in &src_list {
            let scenario = config.with_pu_snr_db(pu)?.with_source_snr_db(src)?;
            validate_grid(&scenario, target)?;
            let rows = sweep_rows(&scenario, target)?;
            let path = if single {
                out.to_path_buf()
            } else {
                combo_path(out, pu, src)
            };
            write_csv(&path, target, &rows)?;
            written.push(path);
        }
    }
    Ok(written)
}

struct SweepRow {
    p_t: f64,
    power_w: f64,
    n_samples: f64,
    regime: Regime,
}

fn validate_grid(config: &ScenarioConfig, target: SweepTarget) -> Result<()> {
    let g = &config.sweep;
    if !(g.p_t_min > 0.0 && g.p_t_max > g.p_t_min) {
        return Err(Error::InvalidConfig(format!(
            "sweep grid must satisfy 0 < p_t_min < p_t_max, got [{}, {}]",
            g.p_t_min, g.p_t_max
        )));
    }
    if g.points < 2 {
        return Err(Error::InvalidConfig("sweep grid needs at least 2 points".into()));
    }
    let cap = match target {
        SweepTarget::Appos => 1.0,
        _ => config.senv.p_h0(),
    };
    if g.p_t_max >= cap {
        return Err(Error::InvalidConfig(format!(
            "sweep p_t_max = {} must stay below {} for this target",
            g.p_t_max, cap
        )));
    }
    Ok(())
}

fn sweep_rows(config: &ScenarioConfig, target: SweepTarget) -> Result<Vec<SweepRow>> {
    let g = &config.sweep;
    let step = (g.p_t_max - g.p_t_min) / (g.points - 1) as f64;
    (0..g.points)
        .into_par_iter()
        .map(|i| {
            let p_t = g.p_t_min + step * i as f64;
            let n = spectrum_sensing::n_of_p_t(p_t, &config.senv)?;
            let power_w = match target {
                SweepTarget::Amos => spectrum_sensing::p_amos(p_t, &config.senv)?,
                SweepTarget::Appos => appos_model::p_appos(p_t, &config.aenv, &config.senv)?,
                SweepTarget::Total => {
                    joint_optimizer::p_total(p_t, &config.senv, &config.aenv)?.p_total_w
                }
            };
            Ok(SweepRow {
                p_t,
                power_w,
                n_samples: n,
                regime: if n == 0.0 { Regime::NoSensing } else { Regime::Sensing },
            })
        })
        .collect()
}

fn write_csv(path: &Path, target: SweepTarget, rows: &[SweepRow]) -> Result<()> {
    let mut buf = Vec::new();
    let column = match target {
        SweepTarget::Amos => "amos_power_w",
        SweepTarget::Appos => "appos_power_w",
        SweepTarget::Total => "total_power_w",
    };
    let _ = writeln!(buf, "p_t,{column},n_samples,regime");
    for r in rows {
        let _ = writeln!(
            buf,
            "{},{},{},{}",
            fmt_sig(r.p_t),
            fmt_sig(r.power_w),
            fmt_sig(r.n_samples),
            regime_name(r.regime)
        );
    }
    std::fs::write(path, &buf)
        .map_err(|e| Error::InvalidConfig(format!("cannot write {}: {e}", path.display())))
}

/// Scientific notation with 9 significant digits; byte-stable.
fn fmt_sig(x: f64) -> String {
    format!("{x:.8e}")
}

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::NoSensing => "NoSensing",
        Regime::Sensing => "Sensing",
    }
}

fn combo_path(out: &Path, pu: f64, src: f64) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep");
    let ext = out.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    out.with_file_name(format!("{stem}_pu{pu}db_src{src}db.{ext}"))
}

fn default_list(given: &[f64], fallback: f64) -> Vec<f64> {
    if given.is_empty() {
        vec![fallback]
    } else {
        given.to_vec()
    }
}

// ---------------------------------------------------------------------------
// optimize
// ---------------------------------------------------------------------------

/// One optimization result row.
#[derive(Debug, Clone)]
pub struct OptimizeRow {
    pub pu_snr_db: f64,
    pub source_snr_db: f64,
    pub optimum: Optimum,
}

/// Minimize the total power for every SNR combination, print a table and
/// optionally write it as CSV.
pub fn cmd_optimize(
    config: &ScenarioConfig,
    pu_snr_db: &[f64],
    source_snr_db: &[f64],
    tol_pt: f64,
    out: Option<&Path>,
) -> Result<Vec<OptimizeRow>> {
    let pu_list = default_list(pu_snr_db, config.pu_snr_db());
    let src_list = default_list(source_snr_db, config.source_snr_db());

    let mut rows = Vec::new();
    for &pu in &pu_list {
        for &src in &src_list {
            let scenario = config.with_pu_snr_db(pu)?.with_source_snr_db(src)?;
            let optimum = joint_optimizer::minimize(&scenario.senv, &scenario.aenv, tol_pt)?;
            rows.push(OptimizeRow {
                pu_snr_db: pu,
                source_snr_db: src,
                optimum,
            });
        }
    }

    println!(
        "{:>10} {:>10} {:>10} {:>11} {:>11} {:>11} {:>8} {:>11} {:>7} {:>6} {:>8}",
        "pu_db", "src_db", "p_t*", "total_w", "amos_w", "appos_w", "share", "n_samples", "convex",
        "iters", "solver"
    );
    for r in &rows {
        let p = &r.optimum.point;
        println!(
            "{:>10.3} {:>10.3} {:>10.6} {:>11.6} {:>11.6} {:>11.6} {:>8.4} {:>11.1} {:>7} {:>6} {:>8}",
            r.pu_snr_db,
            r.source_snr_db,
            p.p_t,
            p.p_total_w,
            p.p_amos_w,
            p.p_appos_w,
            p.amos_share,
            p.n_samples,
            r.optimum.certified_convex,
            r.optimum.iterations,
            solver_name(r.optimum.solver),
        );
    }

    if let Some(path) = out {
        let mut buf = Vec::new();
        let _ = writeln!(
            buf,
            "pu_snr_db,source_snr_db,p_t_opt,total_power_w,amos_power_w,appos_power_w,\
             amos_share,n_samples,certified_convex,iterations,solver"
        );
        for r in &rows {
            let p = &r.optimum.point;
            let _ = writeln!(
                buf,
                "{},{},{},{},{},{},{},{},{},{},{}",
                fmt_sig(r.pu_snr_db),
                fmt_sig(r.source_snr_db),
                fmt_sig(p.p_t),
                fmt_sig(p.p_total_w),
                fmt_sig(p.p_amos_w),
                fmt_sig(p.p_appos_w),
                fmt_sig(p.amos_share),
                fmt_sig(p.n_samples),
                r.optimum.certified_convex,
                r.optimum.iterations,
                solver_name(r.optimum.solver),
            );
        }
        std::fs::write(path, &buf)
            .map_err(|e| Error::InvalidConfig(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(rows)
}

fn solver_name(s: Solver) -> &'static str {
    match s {
        Solver::GoldenSection => "golden",
        Solver::GridRefine => "grid",
    }
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

/// Aggregated simulation results plus the z-score comparison (present when
/// the run had enough slots for one).
#[derive(Debug, Clone)]
pub struct SimulateOutcome {
    pub sim: SimConfig,
    pub stats: McStats,
    pub validation: Option<ValidationReport>,
}

/// Simulate at `p_t` (or at the scenario optimum when `None`) and print a
/// deterministic report.
pub fn cmd_simulate(
    config: &ScenarioConfig,
    slots: u64,
    seed: u64,
    p_t: Option<f64>,
    model: SignalModel,
    tol_pt: f64,
) -> Result<SimulateOutcome> {
    let p_t = match p_t {
        Some(v) => v,
        None => {
            let opt = joint_optimizer::minimize(&config.senv, &config.aenv, tol_pt)?;
            opt.point.p_t
        }
    };
    let sim = SimConfig::for_transmit_probability(config.senv, p_t, slots, seed, model)?;
    let stats = montecarlo::run(&sim)?;

    println!(
        "slots={} n_samples={} seed={} signal={:?} threshold={}",
        sim.n_slots,
        sim.n_samples,
        sim.seed,
        sim.signal_model,
        fmt_sig(stats.threshold)
    );
    println!("slots_h0={} slots_h1={}", stats.slots_h0, stats.slots_h1);
    for (name, r) in [
        ("p_d", &stats.p_d),
        ("p_fa", &stats.p_fa),
        ("p_t", &stats.p_t),
        ("p_coll", &stats.p_collision),
    ] {
        println!(
            "{name:>7} = {:.6} [{:.6}, {:.6}]  ({}/{})",
            r.rate, r.ci_low, r.ci_high, r.successes, r.trials
        );
    }
    println!(
        "statistic H0: mean={} var={}",
        fmt_sig(stats.statistic_h0.mean),
        fmt_sig(stats.statistic_h0.variance)
    );
    println!(
        "statistic H1: mean={} var={}",
        fmt_sig(stats.statistic_h1.mean),
        fmt_sig(stats.statistic_h1.variance)
    );

    let validation = if slots >= 10_000 {
        let report = montecarlo::validate_against_analytic(&sim)?;
        for c in &report.checks {
            println!(
                "z-check {:>5}: empirical {:.6} analytic {:.6} z {:+.3}",
                c.name, c.empirical, c.analytic, c.z
            );
        }
        println!(
            "validation: {} (max |z| = {:.3}, limit 4)",
            if report.pass { "pass" } else { "FAIL" },
            report.max_abs_z
        );
        Some(report)
    } else {
        println!("validation: skipped (needs at least 10000 slots)");
        None
    };

    Ok(SimulateOutcome {
        sim,
        stats,
        validation,
    })
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

/// One named model-consistency check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Results of `jscs validate`.
#[derive(Debug, Clone)]
pub struct ValidationSummary {
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

/// Run the model-consistency suite for a scenario and print one line per
/// property.
pub fn cmd_validate(config: &ScenarioConfig) -> Result<ValidationSummary> {
    let senv = &config.senv;
    let aenv = &config.aenv;
    let mut checks = Vec::new();

    // tail function round trip
    {
        let mut worst = 0.0f64;
        let mut p = 1e-8;
        while p < 0.5 {
            for q in [p, 1.0 - p] {
                let back = normal_tail::q(normal_tail::q_inv(q)?)?.get();
                worst = worst.max((back - q).abs() / q.max(1e-3));
            }
            p *= 1.2;
        }
        checks.push(CheckResult {
            name: "tail round trip",
            pass: worst <= 1e-10,
            detail: format!("max scaled defect {worst:.3e} (limit 1e-10)"),
        });
    }

    // threshold round trip
    {
        let mut worst = 0.0f64;
        for n in [10.0, 1e3, 1e6] {
            let eps = spectrum_sensing::threshold_for_target(n, senv)?;
            let pd = spectrum_sensing::p_d_of(eps, n, senv)?.get();
            worst = worst.max((pd - (1.0 - senv.p_e())).abs());
        }
        checks.push(CheckResult {
            name: "threshold round trip",
            pass: worst <= 1e-9,
            detail: format!("max |p_d - target| {worst:.3e} (limit 1e-9)"),
        });
    }

    // transmission-probability inversion
    {
        let lb = spectrum_sensing::p_t_lower_bound(senv);
        let hi = senv.p_h0();
        let delta = (hi - lb) * 1e-4;
        let mut worst = 0.0f64;
        for i in 0..512 {
            let p = lb + delta + (hi - lb - 2.0 * delta) * i as f64 / 511.0;
            let back = spectrum_sensing::p_t_of_n(spectrum_sensing::n_of_p_t(p, senv)?, senv)?;
            worst = worst.max((back.get() - p).abs() / p);
        }
        checks.push(CheckResult {
            name: "p_t inversion",
            pass: worst <= 1e-8,
            detail: format!("max relative defect {worst:.3e} (limit 1e-8)"),
        });
    }

    // reporting-power derivative vs finite differences
    // (cap below 1 so the central-difference stencil stays in range)
    {
        let xs: Vec<f64> = (0..100).map(|i| 0.02 + 0.979 * i as f64 / 99.0).collect();
        let check = derivative_check(
            |x| appos_model::p_appos(x, aenv, senv).expect("in range"),
            |x| appos_model::p_appos_deriv(x, aenv, senv).expect("in range"),
            &xs,
        );
        checks.push(CheckResult {
            name: "appos derivative",
            pass: check.passes(1e-6),
            detail: format!(
                "max rel err {:.3e} at p_t {:.4} (limit 1e-6)",
                check.max_rel_err, check.worst_x
            ),
        });
    }

    // total-power derivative vs finite differences
    {
        let lb = spectrum_sensing::p_t_lower_bound(senv);
        let hi = senv.p_h0();
        let w = hi - lb;
        let xs: Vec<f64> = (0..100)
            .map(|i| lb + 0.02 * w + 0.96 * w * i as f64 / 99.0)
            .collect();
        let check = derivative_check(
            |x| {
                joint_optimizer::p_total(x, senv, aenv)
                    .expect("in range")
                    .p_total_w
            },
            |x| joint_optimizer::p_total_deriv(x, senv, aenv).expect("in range"),
            &xs,
        );
        checks.push(CheckResult {
            name: "total derivative",
            pass: check.passes(1e-6),
            detail: format!(
                "max rel err {:.3e} at p_t {:.4} (limit 1e-6)",
                check.max_rel_err, check.worst_x
            ),
        });
    }

    // convexity certification
    {
        let report = joint_optimizer::certify_convexity(senv, aenv, 512)?;
        checks.push(CheckResult {
            name: "convexity",
            pass: report.certified,
            detail: format!(
                "{} violations inside ({:.4}, {:.4}), {} outside",
                report.violations_inside.len(),
                report.hypothesis_interval.0,
                report.hypothesis_interval.1,
                report.violations_outside.len()
            ),
        });
    }

    let pass = checks.iter().all(|c| c.pass);
    for c in &checks {
        println!(
            "{} {:<22} {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    println!("validate: {}", if pass { "all checks passed" } else { "FAILURES present" });
    Ok(ValidationSummary { checks, pass })
}

fn derivative_check<F, G>(f: F, df: G, xs: &[f64]) -> finite_diff::DerivativeCheck
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    finite_diff::check_derivative(f, df, xs, 1e-6)
}
