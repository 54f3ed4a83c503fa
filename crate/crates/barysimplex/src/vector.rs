//! Validated stochastic vectors.

use num_traits::{One, Zero};

use crate::rational::{format_rational, rat, Rational};
use crate::{Error, Result};

/// A strictly positive vector whose entries sum to exactly 1.
///
/// Strict positivity is the standing assumption on the weight vectors
/// `p` and `q`; zero entries are rejected. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StochasticVector {
    entries: Vec<Rational>,
}

/// Validates `raw` as a stochastic vector: nonempty, every entry strictly
/// positive, entries summing to exactly 1.
pub fn validate_stochastic_vector(raw: Vec<Rational>) -> Result<StochasticVector> {
    if raw.is_empty() {
        return Err(Error::EmptyVector);
    }
    for (index, value) in raw.iter().enumerate() {
        if *value <= Rational::zero() {
            return Err(Error::NonPositiveEntry {
                index,
                value: format_rational(value),
            });
        }
    }
    let sum: Rational = raw.iter().sum();
    if !sum.is_one() {
        return Err(Error::SumNotOne {
            sum: format_rational(&sum),
        });
    }
    Ok(StochasticVector { entries: raw })
}

impl StochasticVector {
    /// Validating constructor; see [`validate_stochastic_vector`].
    pub fn new(raw: Vec<Rational>) -> Result<Self> {
        validate_stochastic_vector(raw)
    }

    /// The equal-weights vector `(1/n, …, 1/n)`. Panics if `n == 0`.
    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform stochastic vector needs n >= 1");
        StochasticVector {
            entries: vec![rat(1, n as i64); n],
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false // validated vectors have n >= 1
    }

    pub fn get(&self, i: usize) -> &Rational {
        &self.entries[i]
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.entries.iter()
    }
}
