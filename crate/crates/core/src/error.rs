use thiserror::Error;

use crate::pcp::RelationId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PcpError {
    #[error("p = {0} is not a supported prime")]
    InvalidPrime(u32),
    #[error("generator index {index} out of range for {n} generators")]
    GeneratorOutOfRange { index: usize, n: usize },
    #[error("exponent {exponent} not reduced mod {p}")]
    ExponentOutOfRange { exponent: u32, p: u32 },
    #[error("right side of {0} involves a generator that is not later than its left side")]
    NotCollected(RelationId),
    #[error("malformed presentation: {0}")]
    Malformed(String),
    #[error("presentation is inconsistent ({0} overlap tests fail)")]
    Inconsistent(usize),
    #[error("presentation does not refine the lower exponent-p central series")]
    NotWeighted,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error(transparent)]
    Pcp(#[from] PcpError),
    #[error("group of order {p}^{log_order} exceeds the materialization budget of {budget} elements")]
    BudgetExceeded { p: u32, log_order: usize, budget: u64 },
    #[error("abelian invariants over different primes ({0} and {1})")]
    PrimeMismatch(u32, u32),
    #[error("transfer kernel type needs abelianization [3,3], found {0}")]
    TktUndefined(String),
    #[error("generator g{0} of weight > 1 has no definition")]
    MissingDefinition(usize),
    #[error("subspace is not allowable: {0}")]
    NotAllowable(String),
    #[error("{0} requires an odd prime")]
    EvenPrime(&'static str),
    #[error("internal check failed: {0}")]
    Internal(String),
}
