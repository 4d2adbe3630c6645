//! Exact arithmetic for sums of generalized m-gonal numbers.
//!
//! The crate is organized around one pipeline:
//!
//! * [`arith`] — factorization, prime-counting functions Ω/ω, Legendre and
//!   Kronecker symbols, primorials and almost-prime (`P_{L,S}`) membership.
//! * [`polygonal`] — generalized m-gonal numbers `p_m(n)` and brute-force
//!   enumeration of solutions of `Σ a_j p_m(n_j) = n` under divisibility,
//!   gcd and almost-prime constraints.
//! * [`lattice`] — the equivalent shifted-lattice picture `L_d + ν_d` with
//!   diagonal Gram matrix `a_j (m-2)² d_j²`, point counts and theta
//!   coefficients.
//! * [`localdensity`] — exact p-adic local densities of the shifted form,
//!   both by formula and by an independent congruence-counting oracle,
//!   plus the closed-form case tables and the Ω(p)/p bound machinery.
//! * [`eisenstein`] — the Eisenstein coefficient of the theta series as a
//!   product of local densities, its explicit lower bound, and the cuspidal
//!   residual together with its explicit (very lossy) bound.
//! * [`sieve`] — Rosser weights, the error constant C_β(s), the four-fold
//!   sieve sums Σ(D,z) and Σ'(D,z), the main-term product, exact sifted
//!   counts and the threshold arithmetic of the positivity argument.
//!
//! All density and sieve-sum values are exact `BigRational`s; only the
//! explicit analytic bounds (which involve constants like 2.04e-64 and
//! D^28.85) are evaluated in log10 domain.

pub mod arith;
pub mod eisenstein;
pub mod error;
pub mod interval;
pub mod lattice;
pub mod localdensity;
pub mod polygonal;
pub mod sieve;

pub use arith::{Factorization, PrimeSetS, QuarticUnit};
pub use error::Error;
pub use interval::Enclosure;
pub use lattice::ShiftedLattice;
pub use polygonal::{PolygonalProblem, ScaledTarget, SolutionConstraint};

// numeric backbone, re-exported so downstream crates share one version
pub use num_bigint;
pub use num_rational;
pub use num_traits;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

/// Exact rational number used throughout the crate.
pub type Rat = num_rational::BigRational;

/// Arbitrary-precision integer used throughout the crate.
pub type Int = num_bigint::BigInt;

/// Convenience: exact rational from an i128.
pub fn rat(n: i128) -> Rat {
    Rat::from_integer(Int::from(n))
}

/// Convenience: exact rational n/d from i128 parts.
pub fn ratio(n: i128, d: i128) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}
