use thiserror::Error;

use crate::semiring::SemiringKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("semiring kind mismatch: {left} vs {right}")]
    KindMismatch {
        left: SemiringKind,
        right: SemiringKind,
    },
    #[error("partial sum undefined: {0}")]
    UndefinedSum(String),
    #[error("enumeration needs {count} items, above the cap of {cap}")]
    CombinatorialLimit { count: u128, cap: usize },
    #[error("carrier mismatch: {0}")]
    CarrierMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("type error: {0}")]
    Type(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("stack has no polynomial layer left after erasing branching")]
    DegenerateStack,
    #[error("stack mismatch: {0}")]
    StackMismatch(String),
    #[error("iterate {iteration} is not below its predecessor at ({row}, {col})")]
    MonotonicityViolation {
        iteration: usize,
        row: String,
        col: String,
    },
}

impl Error {
    pub(crate) fn kind_mismatch(left: SemiringKind, right: SemiringKind) -> Self {
        Error::KindMismatch { left, right }
    }
}
