use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PspError {
    #[error("unknown user `{0}`")]
    UnknownUser(String),
    #[error("{what} of size {size} exceeds the limit {limit}")]
    TooLarge { what: &'static str, size: usize, limit: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("partitions have different carriers")]
    CarrierMismatch,
    #[error("parameter {value} outside [{lo}, {hi}]")]
    OutOfRange { value: Rational, lo: Rational, hi: Rational },
    #[error("function is not monotone on the window")]
    NonMonotone,
    #[error("not submodular: f({x:#b}) + f({y:#b}) < f(meet) + f(join)")]
    NotSubmodular { x: u64, y: u64 },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, PspError>;
