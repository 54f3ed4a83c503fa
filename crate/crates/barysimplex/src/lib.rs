//! Exact-rational solutions for the trace-maximization linear program over
//! stochastic matrices with a prescribed barycenter.
//!
//! Given stochastic vectors `p, q > 0`, the candidate set is
//!
//! ```text
//! U = { U : Uᵀq = p,  U1 = 1,  U ≥ 0 }
//! ```
//!
//! and the problem is `max { tr(U) : U ∈ U }`. This crate constructs the
//! closed-form optimum `Ū`, its inverse `V̄`, the dual triple `(ᾱ, β̄, Γ̄)`,
//! KKT certificates, a uniqueness verdict with a constructive alternate
//! optimum, the permutation-relaxed variant `max tr(MU)` over permutation
//! matrices `M`, and the synthesis of coherent conditional CDFs from the
//! resulting matrices.
//!
//! All optimization-side arithmetic is exact ([`Rational`] is an
//! arbitrary-precision fraction); floating point appears only in
//! [`cdf_synth`]. The [`lp_oracle`] module is an independent two-phase
//! simplex solver used to confirm the closed forms from first principles;
//! it shares no logic with [`closed_form`] beyond the core types.

pub mod cdf_synth;
pub mod closed_form;
pub mod kkt;
pub mod lp_oracle;
mod matrix;
pub mod permutation_opt;
mod rational;
#[cfg(any(test, feature = "test-support"))]
#[doc(hidden)]
pub mod test_support;
mod vector;

pub use matrix::{determinant, mat_mul, trace, GeneralMatrix, StochasticMatrix};
pub use rational::{format_rational, neg_part, parse_rational, pos_part, rat, Rational};
pub use vector::{validate_stochastic_vector, StochasticVector};

/// Errors shared by every module in the crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// A stochastic vector must have at least one entry.
    #[error("vector is empty")]
    EmptyVector,
    /// Stochastic vectors are strictly positive; entry `index` is not.
    #[error("entry {index} is not strictly positive: {value}")]
    NonPositiveEntry { index: usize, value: String },
    /// Stochastic vector entries must sum to exactly 1.
    #[error("entries sum to {sum}, expected exactly 1")]
    SumNotOne { sum: String },
    /// Stochastic matrices are entrywise nonnegative.
    #[error("matrix entry ({row}, {col}) is negative: {value}")]
    NegativeEntry { row: usize, col: usize, value: String },
    /// Stochastic matrix rows must sum to exactly 1.
    #[error("row {row} sums to {sum}, expected exactly 1")]
    RowSumNotOne { row: usize, sum: String },
    /// Operands do not have conforming dimensions.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// A fraction string could not be parsed.
    #[error("cannot parse {input:?} as a fraction: {reason}")]
    ParseFraction { input: String, reason: String },
    /// An LP handed to the simplex solver is internally inconsistent.
    #[error("malformed LP: {0}")]
    MalformedLp(String),
    /// A transformation family needs at least one member.
    #[error("transformation family size must be at least 1")]
    EmptyFamily,
    /// Mixture weights for a coherence check are invalid.
    #[error("bad weights: {0}")]
    BadWeights(String),
    /// An empirical CDF sample is empty or non-finite.
    #[error("bad sample: {0}")]
    BadSample(String),
    /// An evaluation grid is too small or out of order.
    #[error("bad grid: {0}")]
    BadGrid(String),
    /// An x-grid for CDF synthesis must be strictly increasing.
    #[error("x grid must be strictly increasing")]
    UnsortedGrid,
}

pub type Result<T> = std::result::Result<T, Error>;
