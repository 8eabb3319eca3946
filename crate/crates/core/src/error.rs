use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1, got {0}")]
    BadDegree(u32),
    #[error("{what} is {value}, above the configured cap {cap}")]
    CapExceeded { what: &'static str, value: u128, cap: u128 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("F_{{{p}^{src}}} does not embed in F_{{{p}^{dst}}}")]
    NotSubfield { p: u32, src: u32, dst: u32 },
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("singular curve: {0}")]
    SingularCurve(String),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
