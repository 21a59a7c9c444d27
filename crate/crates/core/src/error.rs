//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Mixed scalar and matrix operands.
    #[error("value variant mismatch: {0} vs {1}")]
    VariantMismatch(&'static str, &'static str),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    #[error("denominator must be nonzero")]
    ZeroDenominator,

    #[error("interval endpoints must satisfy lo < hi")]
    EmptyInterval,

    #[error("operation requires bounded intervals")]
    UnboundedBox,

    /// The probed point lies in the singularity set.
    #[error("point {0} is singular")]
    SingularPoint(String),

    /// No chart of a finite family covers the probed regular point.
    #[error("point {0} is not covered by any chart")]
    UncoveredPoint(String),

    /// A descriptor admits no regular rational point for the request.
    #[error("no regular rational point available: {0}")]
    NoRegularPoint(String),

    /// The singularity set is not a member of the directed family.
    #[error("singularity set is not a member of the family")]
    NotAMember,

    /// Containment of singularity sets could not be certified.
    #[error("restriction not certified: target does not contain source")]
    UncertifiedRestriction,

    /// Net components must be maximally smooth.
    #[error("component is not of unbounded smoothness grade")]
    GradeViolation,

    /// A generated family was probed beyond its materialization budget.
    #[error("generated family probe exceeds enumeration budget: {0}")]
    EnumerationBudget(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn dim(expected: usize, got: usize) -> Self {
        Error::DimMismatch { expected, got }
    }
}
