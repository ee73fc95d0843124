use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("series is not invertible: constant term is zero")]
    NonInvertible,
    #[error("zero element has infinite filtration degree")]
    ZeroElement,
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("filtration violation: {0}")]
    FiltrationViolation(String),
    #[error("series did not terminate: {0}")]
    NonTermination(String),
    #[error("operator or source term has an ℏ⁰ part")]
    ZerothOrderViolation,
    #[error("initial condition is not invertible")]
    NonInvertibleInitialCondition,
    #[error("ℏ⁰ part is not a scalar constant")]
    NonConstantZerothOrder,
    #[error("matrix is not antisymmetric")]
    NotAntisymmetric,
    #[error("ℏ¹ part of the Poisson matrix is degenerate")]
    DegeneratePi1,
    #[error("form is not closed: first nonzero term of d: {0}")]
    NotClosed(String),
    #[error("bivector has an ℏ⁰ part")]
    NotFormal,
    #[error("cocycle is not constant")]
    NonConstantCocycle,
    #[error("connection is not compatible: {0}")]
    IncompatibleConnection(String),
    #[error("recursion did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("symplectic form is degenerate")]
    DegenerateOmega,
    #[error("cochain is not δ-flat")]
    NotDeltaFlat,
    #[error("element is not divisible by ℏ^{0}")]
    NonDivisible(u32),
    #[error("profiles differ")]
    ProfileMismatch,
    #[error("dimension {0} exceeds the supported maximum")]
    DimensionTooLarge(usize),
    #[error("check failed: {0}")]
    CheckFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
