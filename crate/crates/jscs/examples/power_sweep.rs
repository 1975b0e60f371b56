//! Sweep the three power curves over the transmission probability and
//! write them as CSV files, one per SNR combination — the data behind the
//! usual sensing-power / reporting-power / total-power figures.
//!
//! ```bash
//! cargo run --example power_sweep [output-dir]
//! ```

use std::path::PathBuf;

use jscs::cli::{cmd_sweep, SweepTarget};
use jscs::ScenarioConfig;

fn main() -> jscs::Result<()> {
    let out_dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    let scenario = ScenarioConfig::default();

    // sensing power rises with p_t, and rises faster the weaker the
    // primary signal is at the detector
    let files = cmd_sweep(
        &scenario,
        SweepTarget::Amos,
        &[-20.0, -15.0, -10.0],
        &[],
        &out_dir.join("amos.csv"),
    )?;
    // reporting power falls with p_t, noisier observations cost more
    let files2 = cmd_sweep(
        &scenario,
        SweepTarget::Appos,
        &[],
        &[5.0, 10.0, 15.0],
        &out_dir.join("appos.csv"),
    )?;
    // the sum has one valley per combination
    let files3 = cmd_sweep(
        &scenario,
        SweepTarget::Total,
        &[-20.0, -15.0, -10.0],
        &[5.0, 10.0, 15.0],
        &out_dir.join("total.csv"),
    )?;

    for f in files.iter().chain(&files2).chain(&files3) {
        println!("wrote {}", f.display());
    }
    println!("columns: p_t,<power_w>,n_samples,regime");
    Ok(())
}
