use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("space mismatch: {left} vs {right}")]
    SpaceMismatch { left: String, right: String },

    #[error("base point is the zero vector")]
    ZeroVector,

    #[error("operator is zero")]
    ZeroOperator,

    #[error("invalid norm descriptor `{0}`")]
    InvalidNorm(String),

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("supporting functional enumeration overflow: {zeros} zero coordinates exceed the cap of {cap}")]
    SupportOverflow { zeros: usize, cap: usize },

    #[error("selector index {index} out of range for {len} extreme functionals")]
    InvalidSelector { index: usize, len: usize },

    #[error("epsilon {0} outside the admissible range")]
    EpsilonOutOfRange(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("orthogonality hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("dual space is not strictly convex; only the epsilon identity is available")]
    NotStrictlyConvex,

    #[error("inconclusive: operator norm accuracy {accuracy:e} exceeds tolerance {tol:e}")]
    Inconclusive { accuracy: f64, tol: f64 },

    #[error("attainment sample empty after {budget} candidates (tolerance too tight)")]
    EmptyAttainment { budget: usize },

    #[error("basis is linearly dependent (smallest Gram eigenvalue {0:e})")]
    DependentBasis(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
