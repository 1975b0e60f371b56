//! Scenario configuration: defaults, a flat sectioned key-value file
//! format, and dB ↔ linear conversions.
//!
//! The file format is three sections of `key = value` lines:
//!
//! ```text
//! [sensing]
//! signal_power = 0.03162277660168379   # or: pu_snr_db = -15
//! noise_power = 1
//! p_h0 = 0.7                           # or: p_h1 = 0.3
//! p_e = 0.1
//! e_sample = 0.0001
//! slot_len = 1
//!
//! [source]
//! source_var = 1
//! obs_noise_var = 0.1                  # or: source_snr_db = 10
//! k_nodes = 10
//! symbol_rate = 1000000
//! distortion = 0.1
//! bandwidth = 5000000
//! n0 = 0.0000252
//!
//! [sweep]
//! p_t_min = 0.1
//! p_t_max = 0.68
//! points = 512
//! ```
//!
//! Values are SI units; `_db` keys are accepted as input alternatives for
//! the two power ratios. Missing keys keep their defaults. `#` starts a
//! comment. Serialization always emits the linear keys with Rust's exact
//! shortest float representation, so `parse(serialize(c)) == c` bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use crate::appos_model::SourceEnv;
use crate::error::{Error, Result};
use crate::spectrum_sensing::SensingEnv;

/// Transmission-probability grid for sweep commands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepGrid {
    pub p_t_min: f64,
    pub p_t_max: f64,
    pub points: usize,
}

/// A complete scenario: detector environment, source environment and the
/// sweep grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub senv: SensingEnv,
    pub aenv: SourceEnv,
    pub sweep: SweepGrid,
}

/// `10^(db/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// `10·log10(ratio)`.
pub fn linear_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

impl Default for ScenarioConfig {
    /// The reference scenario: -15 dB primary SNR over unit noise, 30%
    /// primary occupancy, 0.1 miss cap, 0.1 mJ per detector sample, 1 s
    /// slots; a unit-variance source observed by 10 nodes at 10 dB, 1
    /// Mbaud, distortion bound 0.1, a 5 MHz channel at N0 = 2.52e-5 W/Hz.
    fn default() -> Self {
        Self {
            senv: SensingEnv::new(db_to_linear(-15.0), 1.0, 0.7, 0.1, 1e-4, 1.0)
                .expect("reference sensing env is valid"),
            aenv: SourceEnv::new(1.0, 0.1, 10, 1e6, 0.1, 5e6, 2.52e-5)
                .expect("reference source env is valid"),
            sweep: SweepGrid {
                p_t_min: 0.1,
                p_t_max: 0.68,
                points: 512,
            },
        }
    }
}

impl ScenarioConfig {
    /// Primary SNR at the detector in dB.
    pub fn pu_snr_db(&self) -> f64 {
        linear_to_db(self.senv.signal_power() / self.senv.noise_power())
    }

    /// Source observation SNR in dB (`+∞` for noiseless observers).
    pub fn source_snr_db(&self) -> f64 {
        linear_to_db(self.aenv.source_var() / self.aenv.obs_noise_var())
    }

    /// Rebuild with the primary SNR set to `db` (noise power unchanged).
    pub fn with_pu_snr_db(&self, db: f64) -> Result<Self> {
        let senv = SensingEnv::new(
            self.senv.noise_power() * db_to_linear(db),
            self.senv.noise_power(),
            self.senv.p_h0(),
            self.senv.p_e(),
            self.senv.e_sample(),
            self.senv.slot_len(),
        )?;
        Ok(Self {
            senv,
            aenv: self.aenv,
            sweep: self.sweep,
        })
    }

    /// Rebuild with the source observation SNR set to `db` (source
    /// variance unchanged). Fails when the implied observation noise makes
    /// the distortion bound infeasible.
    pub fn with_source_snr_db(&self, db: f64) -> Result<Self> {
        let aenv = SourceEnv::new(
            self.aenv.source_var(),
            self.aenv.source_var() / db_to_linear(db),
            self.aenv.k_nodes(),
            self.aenv.symbol_rate(),
            self.aenv.distortion(),
            self.aenv.bandwidth(),
            self.aenv.n0(),
        )?;
        Ok(Self {
            senv: self.senv,
            aenv,
            sweep: self.sweep,
        })
    }

    /// Rebuild with a different slot length.
    pub fn with_slot_len(&self, slot_len: f64) -> Result<Self> {
        let senv = SensingEnv::new(
            self.senv.signal_power(),
            self.senv.noise_power(),
            self.senv.p_h0(),
            self.senv.p_e(),
            self.senv.e_sample(),
            slot_len,
        )?;
        Ok(Self {
            senv,
            aenv: self.aenv,
            sweep: self.sweep,
        })
    }

    /// Rebuild with a different channel noise density.
    pub fn with_n0(&self, n0: f64) -> Result<Self> {
        let aenv = SourceEnv::new(
            self.aenv.source_var(),
            self.aenv.obs_noise_var(),
            self.aenv.k_nodes(),
            self.aenv.symbol_rate(),
            self.aenv.distortion(),
            self.aenv.bandwidth(),
            n0,
        )?;
        Ok(Self {
            senv: self.senv,
            aenv,
            sweep: self.sweep,
        })
    }

    /// Parse the sectioned key-value format. Unknown sections or keys are
    /// rejected; missing keys keep the defaults.
    pub fn parse_str(text: &str) -> Result<Self> {
        let defaults = Self::default();

        // sensing
        let mut noise_power = defaults.senv.noise_power();
        let mut signal_power: Option<f64> = None;
        let mut pu_snr_db: Option<f64> = None;
        let mut p_h0: Option<f64> = None;
        let mut p_h1: Option<f64> = None;
        let mut p_e = defaults.senv.p_e();
        let mut e_sample = defaults.senv.e_sample();
        let mut slot_len = defaults.senv.slot_len();
        // source
        let mut source_var = defaults.aenv.source_var();
        let mut obs_noise_var: Option<f64> = None;
        let mut source_snr_db: Option<f64> = None;
        let mut k_nodes = defaults.aenv.k_nodes();
        let mut symbol_rate = defaults.aenv.symbol_rate();
        let mut distortion = defaults.aenv.distortion();
        let mut bandwidth = defaults.aenv.bandwidth();
        let mut n0 = defaults.aenv.n0();
        // sweep
        let mut sweep = defaults.sweep;

        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = name.trim().to_string();
                if !matches!(section.as_str(), "sensing" | "source" | "sweep") {
                    return Err(Error::InvalidConfig(format!(
                        "line {}: unknown section [{section}]",
                        lineno + 1
                    )));
                }
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            let num = |v: &str| -> Result<f64> {
                v.parse::<f64>().map_err(|_| {
                    Error::InvalidConfig(format!("line {}: bad number `{v}`", lineno + 1))
                })
            };
            match (section.as_str(), key) {
                ("sensing", "noise_power") => noise_power = num(value)?,
                ("sensing", "signal_power") => signal_power = Some(num(value)?),
                ("sensing", "pu_snr_db") => pu_snr_db = Some(num(value)?),
                ("sensing", "p_h0") => p_h0 = Some(num(value)?),
                ("sensing", "p_h1") => p_h1 = Some(num(value)?),
                ("sensing", "p_e") => p_e = num(value)?,
                ("sensing", "e_sample") => e_sample = num(value)?,
                ("sensing", "slot_len") => slot_len = num(value)?,
                ("source", "source_var") => source_var = num(value)?,
                ("source", "obs_noise_var") => obs_noise_var = Some(num(value)?),
                ("source", "source_snr_db") => source_snr_db = Some(num(value)?),
                ("source", "k_nodes") => {
                    k_nodes = value.parse::<u32>().map_err(|_| {
                        Error::InvalidConfig(format!(
                            "line {}: k_nodes must be a positive integer, got `{value}`",
                            lineno + 1
                        ))
                    })?
                }
                ("source", "symbol_rate") => symbol_rate = num(value)?,
                ("source", "distortion") => distortion = num(value)?,
                ("source", "bandwidth") => bandwidth = num(value)?,
                ("source", "n0") => n0 = num(value)?,
                ("sweep", "p_t_min") => sweep.p_t_min = num(value)?,
                ("sweep", "p_t_max") => sweep.p_t_max = num(value)?,
                ("sweep", "points") => {
                    sweep.points = value.parse::<usize>().map_err(|_| {
                        Error::InvalidConfig(format!(
                            "line {}: points must be a positive integer, got `{value}`",
                            lineno + 1
                        ))
                    })?
                }
                ("", k) => {
                    return Err(Error::InvalidConfig(format!(
                        "line {}: key `{k}` before any [section]",
                        lineno + 1
                    )))
                }
                (s, k) => {
                    return Err(Error::InvalidConfig(format!(
                        "line {}: unknown key `{k}` in section [{s}]",
                        lineno + 1
                    )))
                }
            }
        }

        let signal_power = match (signal_power, pu_snr_db) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidConfig(
                    "specify either signal_power or pu_snr_db, not both".into(),
                ))
            }
            (Some(v), None) => v,
            (None, Some(db)) => noise_power * db_to_linear(db),
            (None, None) => defaults.senv.signal_power(),
        };
        let p_h0 = match (p_h0, p_h1) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidConfig(
                    "specify either p_h0 or p_h1, not both".into(),
                ))
            }
            (Some(v), None) => v,
            (None, Some(v)) => 1.0 - v,
            (None, None) => defaults.senv.p_h0(),
        };
        let obs_noise_var = match (obs_noise_var, source_snr_db) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidConfig(
                    "specify either obs_noise_var or source_snr_db, not both".into(),
                ))
            }
            (Some(v), None) => v,
            (None, Some(db)) => source_var / db_to_linear(db),
            (None, None) => defaults.aenv.obs_noise_var(),
        };

        let senv = SensingEnv::new(signal_power, noise_power, p_h0, p_e, e_sample, slot_len)
            .map_err(lift_to_config)?;
        let aenv = SourceEnv::new(
            source_var,
            obs_noise_var,
            k_nodes,
            symbol_rate,
            distortion,
            bandwidth,
            n0,
        )
        .map_err(lift_to_config)?;
        Ok(Self { senv, aenv, sweep })
    }

    /// Read and parse a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidConfig(format!("cannot read {}: {e}", path.display()))
        })?;
        Self::parse_str(&text)
    }

    /// Emit the scenario in the file format, linear keys only, with exact
    /// float round-tripping.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# jscs scenario configuration");
        let _ = writeln!(s, "[sensing]");
        let _ = writeln!(s, "signal_power = {}", self.senv.signal_power());
        let _ = writeln!(s, "noise_power = {}", self.senv.noise_power());
        let _ = writeln!(s, "p_h0 = {}", self.senv.p_h0());
        let _ = writeln!(s, "p_e = {}", self.senv.p_e());
        let _ = writeln!(s, "e_sample = {}", self.senv.e_sample());
        let _ = writeln!(s, "slot_len = {}", self.senv.slot_len());
        let _ = writeln!(s);
        let _ = writeln!(s, "[source]");
        let _ = writeln!(s, "source_var = {}", self.aenv.source_var());
        let _ = writeln!(s, "obs_noise_var = {}", self.aenv.obs_noise_var());
        let _ = writeln!(s, "k_nodes = {}", self.aenv.k_nodes());
        let _ = writeln!(s, "symbol_rate = {}", self.aenv.symbol_rate());
        let _ = writeln!(s, "distortion = {}", self.aenv.distortion());
        let _ = writeln!(s, "bandwidth = {}", self.aenv.bandwidth());
        let _ = writeln!(s, "n0 = {}", self.aenv.n0());
        let _ = writeln!(s);
        let _ = writeln!(s, "[sweep]");
        let _ = writeln!(s, "p_t_min = {}", self.sweep.p_t_min);
        let _ = writeln!(s, "p_t_max = {}", self.sweep.p_t_max);
        let _ = writeln!(s, "points = {}", self.sweep.points);
        s
    }
}

// Environment construction failures inside a config file are configuration
// errors for exit-code purposes, except infeasibility, which keeps its type.
fn lift_to_config(e: Error) -> Error {
    match e {
        Error::Domain(msg) => Error::InvalidConfig(msg),
        other => other,
    }
}
