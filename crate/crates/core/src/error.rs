use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("variable count mismatch: {left} vs {right}")]
    VarCountMismatch { left: usize, right: usize },
    #[error("index {index} out of range for {len} variables")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("empty input")]
    EmptyInput,
    #[error("zero polynomial where a nonzero one is required")]
    ZeroPolynomial,
    #[error("input is not homogeneous")]
    NotHomogeneous,
    #[error("mixed coefficient degrees in form")]
    MixedDegrees,
    #[error("expected degree {expected}, got {got}")]
    WrongDegree { expected: usize, got: usize },
    #[error("field is not an eigenvector of the semisimple field at level {0}")]
    NotEigenField(i64),
    #[error("degenerate construction: {0}")]
    Degenerate(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("monomial search bound {bound} exceeds degree cap {cap}")]
    CapExceeded { bound: usize, cap: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
