use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix must have at least one row")]
    EmptyMatrix,
    #[error("expected {expected} entries, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("unsupported norm index {0}, expected 1 or 2")]
    InvalidNorm(u32),
    #[error("radix {0} is not a power of two >= 2")]
    InvalidRadix(u32),
    #[error("invalid option: {0}")]
    InvalidOption(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("scaling entry {index} is not a positive finite number")]
    NonPositiveScaling { index: usize },
    #[error("scaling exponent {exponent} at index {index} leaves the normal double range")]
    ExponentOutOfRange { index: usize, exponent: i32 },
    #[error("scaled entry ({row}, {col}) leaves the normal double range")]
    Range { row: usize, col: usize },
    #[error("off-diagonal row or column {index} is zero; matrix is reducible")]
    ZeroRowOrColumn { index: usize },
    #[error("row and column norms must be positive")]
    NonPositiveNorm,
    #[error("QR iteration did not converge for eigenvalue {index} after {iterations} shifts")]
    NoConvergence { index: usize, iterations: usize },
    #[error("column {index} vanished after scaling")]
    ZeroColumn { index: usize },
    #[error("left and right eigenvectors are orthogonal; condition number is infinite")]
    InfiniteCondition,
}
