use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not invertible with positive determinant (det = {det})")]
    NonInvertible { det: f64 },

    #[error("matrix is not symmetric positive definite: {0}")]
    NotSpd(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("unsupported exponent m = {0} (only 2 and 3 are implemented)")]
    UnsupportedExponent(u32),

    #[error("weights must be ordered nonincreasing and nonnegative, got {0:?}")]
    InvalidWeights([f64; 2]),

    #[error("invalid material parameters: {0}")]
    InvalidParams(String),

    #[error("state is inadmissible (an element has det F <= 0)")]
    InadmissibleState,

    #[error("mesh error: {0}")]
    Mesh(String),
}

pub type Result<T> = std::result::Result<T, Error>;
