//! Validate the closed-form detection model against the independent
//! slotted simulation: run 100k slots at the reference optimum and compare
//! the empirical detection, false-alarm and transmission rates with the
//! analytic values via z-scores.
//!
//! ```bash
//! cargo run --example montecarlo_check
//! ```

use jscs::montecarlo::{run, validate_against_analytic, SignalModel, SimConfig};
use jscs::ScenarioConfig;

fn main() -> jscs::Result<()> {
    let senv = ScenarioConfig::default().senv;
    let sim = SimConfig::for_transmit_probability(
        senv,
        0.42,
        100_000,
        42,
        SignalModel::ComplexGaussian,
    )?;
    println!(
        "simulating {} slots, {} detector samples each, seed {}",
        sim.n_slots, sim.n_samples, sim.seed
    );

    let stats = run(&sim)?;
    println!("threshold = {:.6}", stats.threshold);
    for (name, r) in [
        ("p_d", &stats.p_d),
        ("p_fa", &stats.p_fa),
        ("p_t", &stats.p_t),
        ("p_coll", &stats.p_collision),
    ] {
        println!(
            "{name:>7} = {:.5} (95% CI [{:.5}, {:.5}], {}/{})",
            r.rate, r.ci_low, r.ci_high, r.successes, r.trials
        );
    }

    let report = validate_against_analytic(&sim)?;
    println!("\nz-scores against the closed forms:");
    for c in &report.checks {
        println!(
            "  {:>5}: empirical {:.5} vs analytic {:.5} -> z = {:+.2}",
            c.name, c.empirical, c.analytic, c.z
        );
    }
    println!(
        "verdict: {} (max |z| = {:.2}, limit 4)",
        if report.pass { "consistent" } else { "INCONSISTENT" },
        report.max_abs_z
    );
    Ok(())
}
