use thiserror::Error;

/// Errors produced by the model, the optimizer, the simulator and the
/// configuration layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested distortion cannot be met by any coding rate for the
    /// given observer count and observation noise.
    #[error("infeasible distortion {given}: smallest feasible value is {min_feasible:.6e}")]
    InfeasibleDistortion { given: f64, min_feasible: f64 },

    /// A configuration file, flag combination or scenario definition was
    /// rejected before any computation ran.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The minimizer could not bracket a minimum on its search grid.
    #[error("bracket failure: {0}")]
    BracketFailure(String),

    /// A derivative was requested exactly at the boundary between the
    /// no-sensing and sensing regimes. The total power is differentiable
    /// there (the sensing term fades in with zero slope), so both one-sided
    /// values are reported; callers probing the junction get them explicitly.
    #[error("derivative at the sensing-regime boundary p_t = {at}: left = {left}, right = {right}")]
    RegimeKink { at: f64, left: f64, right: f64 },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
