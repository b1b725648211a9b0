use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScalarError {
    #[error("backend mismatch: {0} vs {1}")]
    BackendMismatch(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("non-finite float")]
    NonFinite,
    #[error("rationality undecidable on float backend")]
    RationalityUndecidable,
    #[error("surd radicand must be square-free and at least 2, got {0}")]
    BadRadicand(u64),
    #[error("{0} backend has no √d")]
    NotSurd(&'static str),
    #[error("{0} is irrational and cannot be represented on the {1} backend")]
    Irrational(String, &'static str),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Errors raised by problem construction and the iteration routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("empty vector")]
    EmptyVector,
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("{0}")]
    Precondition(String),
    #[error("closed form not applicable; use iterate ({0})")]
    ClosedFormNotApplicable(String),
    #[error("absorption region not entered")]
    OutsideRegion,
    #[error("invariant violated: {0}")]
    InvariantViolated(String),
    #[error("output error: {0}")]
    Output(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
