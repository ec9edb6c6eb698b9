use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by an element that is zero at current precision")]
    DivisionByIndeterminateZero,
    #[error("valuation is indeterminate: element vanishes to precision {precision}")]
    IndeterminateValuation { precision: i64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("Hensel iteration cannot start: {0}")]
    NoConvergence(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("trace is not in the base field: {0}")]
    NotRational(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("freeness bound not satisfied: {0}")]
    BoundNotSatisfied(String),
    #[error("freeness criteria disagree: {0}")]
    InternalDisagreement(String),
    #[error("parameter validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),
    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::Config(_) | Error::BoundNotSatisfied(_) => 2,
            Error::PrecisionExhausted(_)
            | Error::IndeterminateValuation { .. }
            | Error::DivisionByIndeterminateZero => 4,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
