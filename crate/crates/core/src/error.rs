use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole of phi at exponent {0}")]
    PhiPole(String),
    #[error("evaluation at a pole: denominator factor {0} vanishes")]
    Pole(String),
    #[error("invalid Cartan matrix: {0}")]
    InvalidCartan(String),
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("truncation overflow: {0}")]
    Truncation(String),
    #[error("singular linear system at weight {0}")]
    Singular(String),
    #[error("inconsistent linear system at weight {0}")]
    Inconsistent(String),
    #[error("series did not terminate within {0} steps")]
    NoTermination(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
