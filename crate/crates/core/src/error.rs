use thiserror::Error;

/// Errors produced by matrix construction, decompositions, estimators and
/// the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        got: String,
    },

    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("matrix entry at ({row}, {col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("permutation map contains index {index} more than once")]
    DuplicateIndex { index: usize },

    #[error("index {index} out of range for length {len}")]
    OutOfRange { index: usize, len: usize },

    #[error("SVD iteration did not converge")]
    ConvergenceFailure,

    #[error("instance too large for exhaustive search: n = {n} exceeds cap {cap}")]
    InstanceTooLarge { n: usize, cap: usize },

    #[error("invalid gamma: floor(gamma * n) = {index} not in [1, {max}]")]
    InvalidGamma { index: usize, max: usize },

    #[error("rank {rank} exceeds column count {m} of the target")]
    RankTooLarge { rank: usize, m: usize },

    #[error("degenerate fit: all abscissae are equal")]
    DegenerateFit,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dim(context: &'static str, expected: impl ToString, got: impl ToString) -> Self {
        Error::DimensionMismatch {
            context,
            expected: expected.to_string(),
            got: got.to_string(),
        }
    }
}
