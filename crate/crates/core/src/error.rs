use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("modulus base is not prime")]
    NotPrime,
    #[error("exponent k must be at least 1")]
    ZeroExponent,
    #[error("element is not a unit modulo p^k")]
    NotAUnit,
    #[error("element is a quadratic non-residue")]
    NonResidue,
    #[error("element is not a square modulo 2^k")]
    NotASquare,
    #[error("matrix is not symmetric")]
    AsymmetricMatrix,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("form is singular (determinant 0)")]
    SingularForm,
    #[error("target must be non-zero")]
    ZeroTarget,
    #[error("duplicate prime in factorization")]
    DuplicatePrime,
    #[error("no representation of the requested kind exists")]
    NoSolution,
    #[error("randomized step exhausted its retry budget")]
    Fail,
    #[error("enumeration needs {needed} vectors, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("need at least {needed} observations, got {got}")]
    InsufficientSamples { needed: u64, got: u64 },
}
