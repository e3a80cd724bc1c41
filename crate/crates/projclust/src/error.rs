use thiserror::Error;

/// Errors produced by the library.
///
/// Precondition violations on cheap hot-path accessors (e.g. point indices)
/// panic instead; `Error` covers data-dependent failures a caller can
/// reasonably hit with well-typed inputs.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("instance too large for exhaustive search: n = {n} exceeds the size guard max_n = {max_n}")]
    SizeGuard { n: usize, max_n: usize },

    #[error("csv parse error at line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
