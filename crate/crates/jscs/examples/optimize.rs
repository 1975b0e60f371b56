//! Find the minimum-total-power operating point of the reference scenario,
//! then show how the optimum moves with the primary-user SNR.
//!
//! ```bash
//! cargo run --example optimize
//! ```

use jscs::joint_optimizer::minimize;
use jscs::ScenarioConfig;

fn main() -> jscs::Result<()> {
    let scenario = ScenarioConfig::default();
    let best = minimize(&scenario.senv, &scenario.aenv, 1e-4)?;
    let p = &best.point;

    println!("reference scenario optimum");
    println!("  p_t*        = {:.4}", p.p_t);
    println!("  total power = {:.4} W", p.p_total_w);
    println!("  sensing     = {:.4} W ({:.1}% of total)", p.p_amos_w, 100.0 * p.amos_share);
    println!("  reporting   = {:.4} W", p.p_appos_w);
    println!("  samples     = {:.0} per slot", p.n_samples);
    println!("  convex cert = {}, {} refinement iterations", best.certified_convex, best.iterations);

    println!("\noptimum vs primary SNR (source SNR fixed at 10 dB):");
    println!("{:>8} {:>9} {:>10} {:>9}", "pu_db", "p_t*", "total_w", "share");
    for pu_db in [-20.0, -15.0, -10.0] {
        let s = scenario.with_pu_snr_db(pu_db)?;
        let opt = minimize(&s.senv, &s.aenv, 1e-4)?;
        println!(
            "{:>8} {:>9.4} {:>10.4} {:>9.4}",
            pu_db, opt.point.p_t, opt.point.p_total_w, opt.point.amos_share
        );
    }
    Ok(())
}
