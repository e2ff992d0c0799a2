use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input (dimension mismatch, bad parameter).
    #[error("invalid input: {0}")]
    Input(String),

    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Instance exceeds a size guard.
    #[error("resource limit: {0}")]
    Resource(String),

    /// A solver stopped without reaching the requested accuracy.
    #[error("solver failure: {message}")]
    Solver {
        message: String,
        /// Best iterate available when the solver gave up, if any.
        best: Option<Vec<f64>>,
    },

    /// Adaptive quadrature ran out of subdivision budget.
    #[error("accuracy not reached: estimate {estimate}, error bound {error_bound}")]
    Accuracy { estimate: f64, error_bound: f64 },

    /// A documented precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The request is logically inconsistent with the computed state.
    #[error("logic error: {0}")]
    Logic(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
