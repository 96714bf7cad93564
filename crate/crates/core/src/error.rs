use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input that does not describe a valid instance, bundle or value.
    #[error("malformed input: {0}")]
    Malformed(String),

    /// An allocation that is not a partition of the goods among the agents.
    #[error("invalid allocation: {0}")]
    Structural(String),

    /// Work that exceeds a configured size cap or enumeration budget.
    #[error("capacity exceeded: {what} (limit {limit})")]
    Capacity { what: String, limit: u64 },

    #[error("degree range <{k},{l}> out of bounds for m = {m}")]
    RangeOutOfBounds { k: usize, l: usize, m: usize },

    /// The requested procedure does not apply to this instance.
    #[error("precondition not met: {0}")]
    Precondition(String),

    #[error("infeasible request: {0}")]
    Infeasible(String),

    /// A runtime check of a step of a constructive existence argument failed.
    #[error("proof mismatch at {step}: {detail}")]
    ProofMismatch { step: String, detail: String },

    #[error("internal assertion failed: {0}")]
    Internal(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn mismatch(step: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::ProofMismatch {
            step: step.into(),
            detail: detail.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
