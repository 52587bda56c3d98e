use thiserror::Error;

/// Errors raised by the kernel, Fock-space and moment routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid pair partition: {0}")]
    InvalidPairPartition(String),

    #[error("q = {0} is outside (-1, 1]")]
    InvalidQ(f64),

    #[error("{what}: value {value} outside the admissible range {range}")]
    OutOfRange {
        what: &'static str,
        value: usize,
        range: String,
    },

    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("{what} needs {requested} elements (dim {dim}, degree {degree}), cap is {cap}")]
    CapExceeded {
        what: &'static str,
        dim: usize,
        degree: usize,
        requested: u128,
        cap: usize,
    },

    #[error("{what}: size {size} exceeds the enumeration cap {cap}")]
    EnumerationCap {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("odd size {0}: pair partitions need an even ground set")]
    OddPairCount(usize),

    #[error("expected a real value, imaginary residue {imag:e} exceeds {tolerance:e}")]
    NonReal { imag: f64, tolerance: f64 },

    #[error("{0}")]
    Hypothesis(String),

    #[error("malformed kernel data: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
