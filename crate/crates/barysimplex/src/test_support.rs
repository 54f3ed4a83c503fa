//! Seeded random-instance generators shared by the test suites.
//!
//! Not part of the public API surface; exposed (hidden) so integration and
//! downstream test targets can draw the same exact-rational instances.

use num_traits::{One, Zero};
use rand::Rng;

use crate::lp_oracle::StandardFormLp;
use crate::matrix::{GeneralMatrix, StochasticMatrix};
use crate::rational::{rat, Rational};
use crate::vector::{validate_stochastic_vector, StochasticVector};

/// Draws a strictly positive rational probability vector of length `n`:
/// `n` integer parts from `1..=denominator_bound`, normalized by their sum.
pub fn random_stochastic_vector<R: Rng>(
    rng: &mut R,
    n: usize,
    denominator_bound: i64,
) -> StochasticVector {
    assert!(n > 0 && denominator_bound >= 1);
    let parts: Vec<i64> = (0..n)
        .map(|_| rng.random_range(1..=denominator_bound))
        .collect();
    let total: i64 = parts.iter().sum();
    validate_stochastic_vector(parts.into_iter().map(|a| rat(a, total)).collect())
        .expect("normalized positive parts form a stochastic vector")
}

/// Draws a row-stochastic matrix with nonnegative rational entries: each
/// row is `n` integer parts from `0..=denominator_bound` (at least one
/// positive), normalized by the row sum.
pub fn random_stochastic_matrix<R: Rng>(
    rng: &mut R,
    n: usize,
    denominator_bound: i64,
) -> StochasticMatrix {
    assert!(n > 0 && denominator_bound >= 1);
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let mut parts: Vec<i64> = (0..n)
            .map(|_| rng.random_range(0..=denominator_bound))
            .collect();
        if parts.iter().all(|&x| x == 0) {
            parts[rng.random_range(0..n)] = 1;
        }
        let total: i64 = parts.iter().sum();
        rows.push(parts.into_iter().map(|a| rat(a, total)).collect());
    }
    StochasticMatrix::from_rows(rows).expect("normalized rows are stochastic")
}

/// Draws a random permutation of `0..n` by Fisher–Yates.
pub fn random_permutation<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    perm
}

/// Sanity helper: exact sum of a rational slice.
pub fn exact_sum(xs: &[Rational]) -> Rational {
    xs.iter().sum()
}

/// Birkhoff LP relaxation of the assignment problem for `costs`:
/// `max Σ c_ij·m_ij` over doubly stochastic `M` (row sums and column sums
/// both 1). Its optimum is attained at a permutation matrix, which the
/// combinatorial solver must match exactly.
pub fn assignment_relaxation_lp(costs: &GeneralMatrix) -> StandardFormLp {
    let n = costs.n();
    let width = n * n;
    let mut objective = vec![Rational::zero(); width];
    for i in 0..n {
        for j in 0..n {
            objective[i * n + j] = costs.get(i, j).clone();
        }
    }
    let mut rows = Vec::with_capacity(2 * n);
    let mut rhs = Vec::with_capacity(2 * n);
    for i in 0..n {
        let mut row = vec![Rational::zero(); width];
        for j in 0..n {
            row[i * n + j] = Rational::one();
        }
        rows.push(row);
        rhs.push(Rational::one());
    }
    for j in 0..n {
        let mut row = vec![Rational::zero(); width];
        for i in 0..n {
            row[i * n + j] = Rational::one();
        }
        rows.push(row);
        rhs.push(Rational::one());
    }
    StandardFormLp { objective, rows, rhs }
}
