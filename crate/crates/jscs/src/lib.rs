//! Joint power model for a cognitive-radio sensor node.
//!
//! Such a node carries two energy sinks. It must *sense the channel*
//! (energy detection over `N` samples per slot, to find slots where the
//! licensed primary user is quiet) and it must *report its source*
//! (deliver observations of a Gaussian source to an access point within a
//! distortion bound). Both costs are functions of a single coupling
//! variable: the effective transmission probability `p_t`. More sensing
//! buys a larger `p_t`; a larger `p_t` lowers the instantaneous coding
//! rate and with it the exponentially rate-priced transmit energy. The
//! sum has a unique interior minimum, and this crate finds it.
//!
//! Module map:
//!
//! * [`normal_tail`] - the `Q` function and its inverse, the only special
//!   functions anything here needs.
//! * [`spectrum_sensing`] - detector statistics, false-alarm/detection
//!   probabilities, the `p_t ↔ N` inversion and the sensing power.
//! * [`appos_model`] - many-observer rate-distortion, AWGN energy per bit
//!   and the reporting power.
//! * [`joint_optimizer`] - total power, convexity certification, the
//!   bracketed golden-section minimizer and parameter calibration.
//! * [`montecarlo`] - independent slotted simulation validating the closed
//!   forms, on a counter-based splittable generator.
//! * [`config`] / [`cli`] - scenario files, sweep/optimize/simulate/validate
//!   commands and CSV output.
//!
//! ```
//! use jscs::{joint_optimizer, ScenarioConfig};
//!
//! let scenario = ScenarioConfig::default();
//! let best = joint_optimizer::minimize(&scenario.senv, &scenario.aenv, 1e-4).unwrap();
//! assert!(best.point.p_t > 0.3 && best.point.p_t < 0.5);
//! assert!(best.certified_convex);
//! ```

pub mod appos_model;
pub mod cli;
pub mod config;
pub mod error;
pub mod finite_diff;
pub mod joint_optimizer;
pub mod montecarlo;
pub mod normal_tail;
pub mod rng;
pub mod spectrum_sensing;

pub use appos_model::SourceEnv;
pub use config::{ScenarioConfig, SweepGrid};
pub use error::{Error, Result};
pub use joint_optimizer::{OperatingPoint, Optimum, Regime};
pub use montecarlo::{McStats, SignalModel, SimConfig};
pub use normal_tail::{q, q_inv, Probability};
pub use spectrum_sensing::SensingEnv;
