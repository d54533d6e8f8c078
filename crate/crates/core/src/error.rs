use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("precision must be at least 1")]
    ZeroPrecision,
    #[error("cannot parse scalar {0:?}")]
    ParseScalar(String),
    #[error("malformed input: {0}")]
    Input(String),
    #[error("scalar {0} is not p-integral")]
    NotPIntegral(String),
    #[error("p^{level} does not fit the 63-bit residue representation for p = {p}")]
    ModulusOverflow { p: u64, level: u32 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("generators do not span a full-rank lattice")]
    NotFullRank,
    #[error("lattices are not nested")]
    NotNested,
    #[error("iteration cap {cap} exceeded; trace {trace:?}")]
    CapExceeded { cap: usize, trace: Vec<(usize, i64)> },
    #[error("matrix is not unipotent")]
    NotUnipotent,
    #[error("input outside the congruence domain: {0}")]
    BadDomain(String),
    #[error("p divides k")]
    PDividesK,
    #[error("working precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("unknown catalog entry {0:?}")]
    UnknownCatalogEntry(String),
    #[error("{sub} is not a catalog subgroup of {parent}")]
    NotASubgroup { parent: String, sub: String },
    #[error("characteristic {0} analysis is not supported")]
    UnsupportedCharacteristic(u64),
    #[error("not of type R: word {word:?} has an eigenvalue off the unit circle")]
    NotTypeR { word: Vec<i64> },
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}
