//! Error type shared by all modules.

use thiserror::Error;

/// Errors surfaced by the library. Domain errors correspond to violated
/// mathematical preconditions; `Degenerate*` variants mark inputs where a
/// quantity the caller asked to normalize by is zero.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("factorization of zero is undefined")]
    ZeroFactorization,
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("{0} is not squarefree")]
    NotSquarefree(u64),
    #[error("polygon order m must be at least 3, got {0}")]
    PolygonOrder(u32),
    #[error("coefficient vector must have between 1 and 8 positive entries")]
    BadCoefficients,
    #[error("target n must be nonnegative, got {0}")]
    NegativeTarget(i64),
    #[error("p = 2 is not supported by the local density formula engine")]
    PrimeTwoUnsupported,
    #[error("rank {0} is not supported here")]
    UnsupportedRank(usize),
    #[error("base density b_p(h, lambda_1, 0) vanishes; omega ratio undefined")]
    DegenerateBaseDensity,
    #[error("pattern not covered by the closed-form case table")]
    UncoveredTableCase,
    #[error("series does not converge for this rank/valuation combination")]
    NonconvergentSeries,
    #[error("sieve error constant diverges: a_beta = {0} >= 1")]
    DivergentRegime(f64),
    #[error("oracle count did not stabilize at depth {depth} (p = {p})")]
    OracleUnstable { p: u64, depth: u32 },
    #[error("oracle modulus p^k = {0} exceeds the enumeration budget")]
    OracleTooLarge(u128),
    #[error("coefficient vector {0:?} is not in the supported explicit list")]
    NotInCoefficientList(Vec<u64>),
    #[error("{0}")]
    Invalid(String),
}
