//! Error type shared across the crate.

use thiserror::Error;

/// Errors returned by constructors, kernels, drivers, and I/O routines.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// A pivot value that must divide a column was exactly zero.
    #[error("zero pivot at column {index}")]
    ZeroPivot { index: usize },

    /// The leading-column divisor of the fused blocked variant was exactly zero.
    #[error("leading column divisor is exactly zero")]
    ZeroLeadingColumn,

    /// An (i, j) index fell outside the matrix.
    #[error("index ({i}, {j}) out of range for order {m}")]
    IndexOutOfRange { i: usize, j: usize, m: usize },

    /// The same strictly-lower entry was supplied twice.
    #[error("duplicate entry at ({i}, {j})")]
    DuplicateEntry { i: usize, j: usize },

    /// An entry with i <= j was supplied where only strictly-lower entries are allowed.
    #[error("entry ({i}, {j}) is not strictly lower")]
    NotStrictLower { i: usize, j: usize },

    /// Operand shapes do not conform.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),

    /// A window-relative pivot index exceeded its window.
    #[error("pivot {pivot} out of window of size {window}")]
    PivotOutOfWindow { pivot: usize, window: usize },

    /// The Pfaffian is only defined for even order.
    #[error("pfaffian requires even order, got {0}")]
    OddDimension(usize),

    /// Packing is only defined when the first column of L is canonical.
    #[error("packing a factorization with a given (non-canonical) first column loses data")]
    PackGivenFirstColumn,

    /// A file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
