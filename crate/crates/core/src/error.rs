use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime in 2..=2^31-1")]
    NotPrime(u64),
    #[error("dimension mismatch in {op}: {detail}")]
    DimensionMismatch { op: &'static str, detail: String },
    #[error("subspace is not contained in the ambient subspace")]
    NotContained,
    #[error("map is not compatible with the given subquotients: {0}")]
    NotChainCompatible(String),
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("size budget exceeded: {what} needs {size} basis elements, budget is {budget}")]
    SizeBudgetExceeded { what: String, size: u128, budget: usize },
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("degree out of range: {0}")]
    OutOfRange(String),
    #[error("chain map violation at level {level}: {detail}")]
    ChainMapViolation { level: usize, detail: String },
    #[error("periodicity u is not an isomorphism HC_{} -> HC_{degree} (stabilization window for the product convention)", degree + 2)]
    NotStabilized { degree: usize, detail: String },
    #[error("u' is nonzero on HC_{degree}")]
    NonzeroUPrime { degree: usize, witness: Vec<(usize, u32)> },
    #[error("not a representation: {0}")]
    NotARepresentation(String),
    #[error("level [{level}] is not free over k[Z/p]")]
    FreenessFailed { level: usize },
    #[error("validation failed: {0}")]
    ValidationFailed(String),
    #[error("commutation failed: {0}")]
    CommutationFailed(String),
    #[error("odd horizontal differential is nonzero at level [{level}] (characteristic differs from p)")]
    OddDifferentialNonzero { level: usize },
    #[error("source/target mismatch: {0}")]
    SourceTargetMismatch(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("unsupported algebra: {0}")]
    UnsupportedAlgebra(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Mathematically inconclusive outcomes, as opposed to usage errors.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::NotStabilized { .. }
                | Error::ValidationFailed(_)
                | Error::FreenessFailed { .. }
                | Error::NonzeroUPrime { .. }
                | Error::NotAGroup(_)
                | Error::InvalidAlgebra(_)
                | Error::CommutationFailed(_)
                | Error::ChainMapViolation { .. }
                | Error::OddDifferentialNonzero { .. }
                | Error::UnsupportedAlgebra(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
