//! Run the model-consistency suite: derivative finite-difference checks,
//! convexity certification and the inversion round trips, printing one
//! pass/fail line per property.
//!
//! ```bash
//! cargo run --example model_checks
//! ```

use jscs::cli::cmd_validate;
use jscs::ScenarioConfig;

fn main() -> jscs::Result<()> {
    let summary = cmd_validate(&ScenarioConfig::default())?;
    std::process::exit(if summary.pass { 0 } else { 4 });
}
