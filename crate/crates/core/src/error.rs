use thiserror::Error;

use crate::engine::RoundLedger;
use crate::graph::NodeId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("infeasible instance spec: {0}")]
    InfeasibleSpec(String),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("precondition violated: node {0} is not reachable from the source")]
    Unreachable(NodeId),

    #[error("round budget of {cap} exceeded")]
    BudgetExceeded { cap: u64, ledger: Box<RoundLedger> },

    #[error("synchronous execution stalled at round {0} with unfinished nodes")]
    Stalled(u64),

    #[error("skeleton too large: {size} > {limit:.1}")]
    SkeletonTooLarge { size: usize, limit: f64 },

    #[error("validation failed: {0}")]
    ValidationFailed(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("retries exhausted after {attempts} attempts: {last}")]
    RetriesExhausted { attempts: u32, last: Box<Error> },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors the randomized steps may recover from by resampling.
    pub fn is_retryable(&self) -> bool {
        matches!(
            self,
            Error::SkeletonTooLarge { .. } | Error::ValidationFailed(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
