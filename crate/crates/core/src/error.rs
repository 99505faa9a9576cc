use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: wrong shapes, unknown labels, values out of range.
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("total dimension {dim} exceeds the configured maximum {max}")]
    Capacity { dim: usize, max: usize },

    /// A filter (or separable map) sends the state to the zero operator.
    #[error("filter annihilates the state (output trace {trace:e})")]
    FilterAnnihilation { trace: f64 },

    /// A guarantee the caller must supply is missing, e.g. an E_d bound
    /// certificate for a witness.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
