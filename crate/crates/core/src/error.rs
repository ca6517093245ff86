use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("point {value} outside domain [{min}, {max}]")]
    OutOfDomain { value: f64, min: f64, max: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("singular linear system: {0}")]
    Singular(&'static str),

    #[error("config line {line}: {msg}")]
    ConfigParse { line: usize, msg: String },

    #[error("config value out of range for `{key}`: {msg}")]
    ConfigRange { key: String, msg: String },

    #[error("config: {0}")]
    Config(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("too few peaks: found {found}, need {needed}")]
    TooFewPeaks { found: usize, needed: usize },

    #[error("overflow evaluating {0}")]
    Overflow(&'static str),

    #[error("numeric abort at step {step} (t = {t}): {what}")]
    NumericAbort { step: u64, t: f64, what: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by the user-supplied configuration.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::ConfigParse { .. } | Error::ConfigRange { .. } | Error::Config(_))
    }
}

pub(crate) fn ensure_finite(values: &[f64], what: &'static str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}
