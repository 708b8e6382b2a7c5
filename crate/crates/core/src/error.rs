use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("eigendecomposition did not converge")]
    NoConvergence,

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace is {trace}, expected 1")]
    InvalidTrace { trace: f64 },

    #[error("support of rho is not contained in the support of sigma (leakage {leakage:e})")]
    SupportViolation { leakage: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not unitary (max deviation of U^dag U from I is {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("ensembles have different member counts ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("ensemble product has zero total weight")]
    DegenerateEnsemble,

    #[error("unknown ensemble name `{0}`")]
    UnknownName(String),

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("dimension {dim} is too large for this routine (max {max})")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invariant violated{}: {message}", member.map(|i| format!(" at member {i}")).unwrap_or_default())]
    InvariantViolation {
        member: Option<usize>,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
