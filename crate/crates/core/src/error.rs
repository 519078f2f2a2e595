use thiserror::Error;

/// Errors raised by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("probabilities sum to {sum:.17}, expected 1 within {tol:e}")]
    NotNormalized { sum: f64, tol: f64 },

    #[error("entry {index} holds {value}, probabilities must be finite and nonnegative")]
    BadProbability { index: usize, value: f64 },

    #[error("table with {entries} entries exceeds the limit of {limit}")]
    TooLarge { entries: u128, limit: u128 },

    #[error("numeric domain error: {0}")]
    NumericDomain(String),

    /// The requested operating point lies outside the region. `threshold`
    /// carries the smallest admissible value of the offending parameter when
    /// one is known.
    #[error("infeasible: {reason}")]
    Infeasible {
        reason: String,
        threshold: Option<f64>,
    },

    #[error("invalid auxiliary system: {0}")]
    InvalidAuxiliary(String),

    #[error("optimiser found no feasible point: {0}")]
    NoFeasiblePointFound(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn infeasible(reason: impl Into<String>, threshold: Option<f64>) -> Self {
        Error::Infeasible {
            reason: reason.into(),
            threshold,
        }
    }
}
