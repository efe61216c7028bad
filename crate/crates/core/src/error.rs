use thiserror::Error;

use crate::sequencer::SequentialityReport;

#[derive(Debug, Error)]
pub enum Error {
    /// An input broke the documented preconditions of an operation.
    #[error("contract violation: {0}")]
    Contract(String),

    /// The underlying factorization did not converge.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// The sequentiality criterion rejected the operator; the report carries
    /// the per-site residuals.
    #[error("operator is not sequentially implementable (max criterion residual {:.3e})", .0.max_residual())]
    NotImplementable(Box<SequentialityReport>),

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Contract(msg.into()))
}
