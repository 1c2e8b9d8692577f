use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is singular")]
    Singular,
    #[error("mode index must be nonzero")]
    ZeroIndex,
    #[error("matrix position (0,0) has no grade")]
    OriginPosition,
    #[error("bracket requires homogeneous elements")]
    NotHomogeneous,
    #[error("element is not an ad-eigenvector: fails for h({0})")]
    NotEigenvector(i64),
    #[error("mode {mode} lies outside rank {rank}")]
    OutOfRange { mode: i64, rank: usize },
    #[error("invalid rank {0}")]
    InvalidRank(usize),
    #[error("malformed pattern: {0}")]
    MalformedPattern(String),
    #[error("invalid top row: {0}")]
    InvalidTopRow(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
