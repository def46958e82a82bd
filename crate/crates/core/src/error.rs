use std::io;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("construction error: {0}")]
    Construction(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("user {user}: {reason}")]
    InvariantViolation { user: usize, reason: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("symbol index {index} out of range for user {user} (M = {m})")]
    SymbolOutOfRange { user: usize, index: usize, m: usize },

    #[error("invalid decoder configuration: {0}")]
    Config(String),

    #[error("singular distributed matrix")]
    SingularMatrix,

    #[error("ML oracle refused: {hypotheses} hypotheses exceed the cap of {cap}")]
    OracleTooLarge { hypotheses: u128, cap: u128 },

    #[error("graph error: {0}")]
    Graph(String),

    #[error("zero-delay cycle through nodes {0:?}")]
    ZeroDelayCycle(Vec<String>),

    #[error("infeasible lifetime for `{0}`: death before birth")]
    InfeasibleLifetime(String),

    #[error("register allocation: {0}")]
    Allocation(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
