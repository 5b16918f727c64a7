use thiserror::Error;

/// Errors raised by the clustering routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: data has {data} columns, codebook has {codebook}")]
    DimensionMismatch { data: usize, codebook: usize },

    #[error("matrix shape {rows}x{cols} does not match {len} values")]
    Shape {
        rows: usize,
        cols: usize,
        len: usize,
    },

    #[error("matrix must have at least one row and one column")]
    Empty,

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("k = {k} exceeds the number of data points n = {n}")]
    TooManyCentroids { k: usize, n: usize },

    #[error("operation needs at least {required} centroids, codebook has {k}")]
    TooFewCentroids { required: usize, k: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
