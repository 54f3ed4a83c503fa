//! Exact KKT certification for the trace-maximization LP.
//!
//! For a primal candidate `U` and dual candidate `(α, β, Γ)` the four
//! conditions are
//!
//! ```text
//! stationarity:             qαᵀ + β1ᵀ − Γ = I
//! primal feasibility:       Uᵀq = p,  U1 = 1,  U ≥ 0
//! dual feasibility:         Γ ≥ 0
//! complementary slackness:  tr(UΓᵀ) = 0
//! ```
//!
//! Together they are necessary *and sufficient* for optimality of both
//! candidates, so a passing certificate is a proof. Every check is exact
//! rational arithmetic with no tolerances, and every failing location is
//! enumerated rather than short-circuited.

use num_traits::{One, Signed, Zero};

use crate::matrix::GeneralMatrix;
use crate::rational::Rational;
use crate::vector::StochasticVector;
use crate::{Error, Result};

/// A single exact violation, tagged with where it occurred and by how much.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `q_i·α_j + β_i − γ_ij − 1[i = j]` is the nonzero `residual`.
    Stationarity {
        row: usize,
        col: usize,
        residual: Rational,
    },
    /// Column `col` of `Uᵀq − p` is the nonzero `residual`.
    BarycenterMismatch { col: usize, residual: Rational },
    /// Row `row` of `U1 − 1` is the nonzero `residual`.
    RowSumMismatch { row: usize, residual: Rational },
    /// `U` has a negative entry at (`row`, `col`).
    NegativePrimalEntry {
        row: usize,
        col: usize,
        value: Rational,
    },
    /// `Γ` has a negative entry at (`row`, `col`).
    NegativeDualEntry {
        row: usize,
        col: usize,
        value: Rational,
    },
    /// A nonzero product `u_ij·γ_ij` contributing to `tr(UΓᵀ) ≠ 0`.
    SlacknessResidual {
        row: usize,
        col: usize,
        product: Rational,
    },
}

/// Outcome of an exact KKT check; `satisfied` iff all four conditions hold,
/// in which case `violations` is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KktCertificate {
    pub stationarity: bool,
    pub primal_feasibility: bool,
    pub dual_feasibility: bool,
    pub complementary_slackness: bool,
    pub satisfied: bool,
    pub violations: Vec<Violation>,
}

fn check_dims(
    u: &GeneralMatrix,
    p: &StochasticVector,
    q: &StochasticVector,
    alpha: &[Rational],
    beta: &[Rational],
    gamma: &GeneralMatrix,
) -> Result<usize> {
    let n = u.n();
    if p.len() != n || q.len() != n || alpha.len() != n || beta.len() != n || gamma.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "U is {n}×{n} but p, q, α, β, Γ have sizes {}, {}, {}, {}, {}×{}",
            p.len(),
            q.len(),
            alpha.len(),
            beta.len(),
            gamma.n(),
            gamma.n()
        )));
    }
    Ok(n)
}

/// Membership test for the candidate set: `U ≥ 0`, `U1 = 1`, `Uᵀq = p`.
pub fn is_member(
    u: &GeneralMatrix,
    p: &StochasticVector,
    q: &StochasticVector,
) -> Result<bool> {
    let n = u.n();
    if p.len() != n || q.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "U is {n}×{n} but p, q have sizes {}, {}",
            p.len(),
            q.len()
        )));
    }
    for i in 0..n {
        if u.row(i).iter().any(|x| x.is_negative()) {
            return Ok(false);
        }
        if u.row(i).iter().sum::<Rational>() != Rational::one() {
            return Ok(false);
        }
    }
    for j in 0..n {
        let image: Rational = (0..n).map(|i| q.get(i) * u.get(i, j)).sum();
        if &image != p.get(j) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Certifies the primal/dual pair against all four KKT conditions,
/// enumerating every exact violation.
pub fn certify(
    u: &GeneralMatrix,
    p: &StochasticVector,
    q: &StochasticVector,
    alpha: &[Rational],
    beta: &[Rational],
    gamma: &GeneralMatrix,
) -> Result<KktCertificate> {
    let n = check_dims(u, p, q, alpha, beta, gamma)?;
    let mut violations = Vec::new();

    let mut stationarity = true;
    for (i, beta_i) in beta.iter().enumerate() {
        for (j, alpha_j) in alpha.iter().enumerate() {
            let mut residual = q.get(i) * alpha_j + beta_i - gamma.get(i, j);
            if i == j {
                residual -= Rational::one();
            }
            if !residual.is_zero() {
                stationarity = false;
                violations.push(Violation::Stationarity { row: i, col: j, residual });
            }
        }
    }

    let mut primal_feasibility = true;
    for j in 0..n {
        let residual: Rational = (0..n).map(|i| q.get(i) * u.get(i, j)).sum::<Rational>() - p.get(j);
        if !residual.is_zero() {
            primal_feasibility = false;
            violations.push(Violation::BarycenterMismatch { col: j, residual });
        }
    }
    for i in 0..n {
        let residual = u.row(i).iter().sum::<Rational>() - Rational::one();
        if !residual.is_zero() {
            primal_feasibility = false;
            violations.push(Violation::RowSumMismatch { row: i, residual });
        }
    }
    for i in 0..n {
        for j in 0..n {
            if u.get(i, j).is_negative() {
                primal_feasibility = false;
                violations.push(Violation::NegativePrimalEntry {
                    row: i,
                    col: j,
                    value: u.get(i, j).clone(),
                });
            }
        }
    }

    let mut dual_feasibility = true;
    for i in 0..n {
        for j in 0..n {
            if gamma.get(i, j).is_negative() {
                dual_feasibility = false;
                violations.push(Violation::NegativeDualEntry {
                    row: i,
                    col: j,
                    value: gamma.get(i, j).clone(),
                });
            }
        }
    }

    let slack_trace: Rational = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| u.get(i, j) * gamma.get(i, j))
        .sum();
    let complementary_slackness = slack_trace.is_zero();
    if !complementary_slackness {
        for i in 0..n {
            for j in 0..n {
                let product = u.get(i, j) * gamma.get(i, j);
                if !product.is_zero() {
                    violations.push(Violation::SlacknessResidual { row: i, col: j, product });
                }
            }
        }
    }

    let satisfied =
        stationarity && primal_feasibility && dual_feasibility && complementary_slackness;
    debug_assert_eq!(satisfied, violations.is_empty());
    Ok(KktCertificate {
        stationarity,
        primal_feasibility,
        dual_feasibility,
        complementary_slackness,
        satisfied,
        violations,
    })
}
