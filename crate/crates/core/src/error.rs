use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("constant term is singular")]
    SingularConstantTerm,
    #[error("matrix is singular")]
    Singular,
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("unknown coefficient family {0:?}")]
    UnknownCoefficient(String),
    #[error("invalid kernel spec: {0}")]
    InvalidSpec(String),
    #[error("exponent {0} is not an integer; use numeric mode")]
    NonIntegerExponent(String),
    #[error("point or parameter outside the unit disc: {0}")]
    OutsideDisc(String),
    #[error("jet orders differ: {0} vs {1}")]
    JetOrderMismatch(usize, usize),
    #[error("|z| = {radius} exceeds the evaluation cap {cap}")]
    RadiusTooLarge { radius: f64, cap: f64 },
    #[error("index constraint violated: {0}")]
    Constraint(String),
    #[error("parse error: {0}")]
    Parse(String),
}
