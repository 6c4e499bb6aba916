use thiserror::Error;

/// Crate-wide error type. Every failure mode named by a module contract maps
/// to a distinct variant.
#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero rational function")]
    DivisionByZero,
    #[error("rational function has a pole at u = infinity (numerator degree {num_deg} > denominator degree {den_deg} in u)")]
    PoleAtInfinity { num_deg: u32, den_deg: u32 },
    #[error("substitution makes the denominator identically zero")]
    SubstitutionPole,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("boson index 0 is undefined")]
    ZeroBosonIndex,
    #[error("fermion mode index must be a half-integer (odd doubled index), got {0}/2")]
    IntegerFermionIndex(i64),
    #[error("tail rule is not degree-homogeneous")]
    NonHomogeneousTail,
    #[error("boson expression mixes distinct degree shifts")]
    MixedShift,
    #[error("vector is supported outside charge zero")]
    ChargeNotZero,
    #[error("dominance order requires equal partition sizes ({0} vs {1})")]
    DominanceSize(u64, u64),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("linear system is inconsistent: {0}")]
    Inconsistent(String),
    #[error("linear system is rank-deficient: {0}")]
    RankDeficient(String),
    #[error("tensor budget exceeded: total dimension {dim} > budget {budget}")]
    BudgetExceeded { dim: u64, budget: u64 },
    #[error("contribution escaped the energy window (need degree > {0})")]
    WindowEscape(u32),
    #[error("Jack eigencheck failed for partition {0} (convention mismatch)")]
    EigencheckFailed(String),
    #[error("cache entry is invalid: {0}")]
    CacheInvalid(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
