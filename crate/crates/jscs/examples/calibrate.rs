//! Fit the two parameters the power model cannot observe directly — slot
//! length and channel noise density — from a reported optimal operating
//! point, then verify that re-optimizing under the fit reproduces it.
//!
//! ```bash
//! cargo run --example calibrate
//! ```

use jscs::joint_optimizer::{calibrate, minimize, ReportedOptimum};
use jscs::ScenarioConfig;

fn main() -> jscs::Result<()> {
    let scenario = ScenarioConfig::default();
    let reported = ReportedOptimum {
        p_t: 0.42,
        total_power_w: 4.8,
        amos_share: 0.051,
    };

    let cal = calibrate(&scenario.senv, &scenario.aenv, &reported)?;
    println!("target point: p_t = {}, total = {} W, sensing share = {}",
        reported.p_t, reported.total_power_w, reported.amos_share);
    println!("fitted slot length  T  = {:.5} s", cal.slot_len);
    println!("fitted noise density N0 = {:.5e} W/Hz", cal.n0);
    println!("sample count at target  = {:.1}", cal.n_samples_at_target);

    // round the fit to the canonical values and re-optimize
    let calibrated = scenario.with_slot_len(1.0)?.with_n0(2.52e-5)?;
    let opt = minimize(&calibrated.senv, &calibrated.aenv, 1e-4)?;
    println!("\nre-optimized under T = 1 s, N0 = 2.52e-5 W/Hz:");
    println!(
        "  p_t* = {:.4}, total = {:.4} W, sensing share = {:.4}",
        opt.point.p_t, opt.point.p_total_w, opt.point.amos_share
    );
    Ok(())
}
