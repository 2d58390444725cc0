use std::path::PathBuf;

use crate::spectral::FourierField;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("mass conservation violated: mean {mean:e} exceeds tolerance {tolerance:e}")]
    MassConservation { mean: f64, tolerance: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("step size {dt:e} exceeds stability limit {limit:e}")]
    StepSize { dt: f64, limit: f64 },

    /// The state is kept so callers can dump it for diagnosis.
    #[error("blow-up at step {step} (t = {time}): {reason}")]
    BlowUp {
        step: u64,
        time: f64,
        reason: String,
        state: Box<FourierField>,
    },

    #[error("snapshot time {time} outside averaging window [{start}, {end}]")]
    Window { time: f64, start: f64, end: f64 },

    #[error("accumulators were built for different statistic requests")]
    Schema,

    #[error("missing statistic: {0}")]
    MissingStatistic(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("zero denominator in {0}")]
    ZeroDenominator(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("config syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid value for `{key}`: {reason}")]
    Validation { key: String, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed data: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn validation(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// True for failures of the numerical integration itself, as opposed to
    /// configuration or I/O problems.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::BlowUp { .. }
                | Error::StepSize { .. }
                | Error::Resolution(_)
                | Error::MassConservation { .. }
        )
    }
}
