//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A semi-axis or other strictly positive quantity was not positive.
    #[error("invalid {name} = {value}: must be strictly positive")]
    NonPositive { name: &'static str, value: f64 },

    /// Moments that do not correspond to any real ellipsoid.
    #[error("moments leave axis {axis} with non-positive square a{axis}^2 = {value}")]
    MomentPositivity { axis: usize, value: f64 },

    /// A shape-ratio constraint denominator vanished.
    #[error("singular shape-ratio constraint: {context} = {value:.3e}")]
    SingularConstraint { context: &'static str, value: f64 },

    /// A shape ratio left the admissible band.
    #[error("shape ratio {name} = {value} outside (-1, 1)")]
    RatioOutOfRange { name: &'static str, value: f64 },

    /// A parameter schedule left its validity window.
    #[error("schedule invalid at t = {t}: {reason}")]
    ScheduleDomain { t: f64, reason: String },

    /// Scenario configuration rejected, with the offending field named.
    #[error("config error [{field}]: {reason}")]
    Config { field: String, reason: String },

    /// TOML syntax or unknown-key failure while reading a config file.
    #[error("config parse error: {0}")]
    ConfigParse(String),

    /// Adaptive step size collapsed below 1e-14 of the span.
    #[error("integration step size underflow at t = {t}: system too stiff or blowing up")]
    StepSizeUnderflow { t: f64 },

    /// The step budget ran out before reaching the end of the span.
    #[error("integration step budget exhausted at t = {t}: system too stiff for an explicit method over this span")]
    StepBudgetExhausted { t: f64 },

    /// The state stopped being finite.
    #[error("integration diverged: non-finite state at t = {t}")]
    Divergence { t: f64 },

    #[error("invalid integration settings: {0}")]
    Settings(String),

    #[error("unknown preset '{0}' (expected euler-flopl, dk-dz3ln or dk-dz5ln)")]
    UnknownPreset(String),

    #[error("unknown verification suite '{0}'")]
    UnknownSuite(String),

    #[error("CSV parse error on line {line}: {reason}")]
    CsvParse { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code bucket used by the CLI: 1 validation, 2 integration.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::StepSizeUnderflow { .. }
            | Error::StepBudgetExhausted { .. }
            | Error::Divergence { .. } => 2,
            _ => 1,
        }
    }
}
