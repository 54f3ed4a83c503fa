//! Independent simplex oracle for the trace-maximization LP and its dual.
//!
//! This module is the cross-check route: a generic two-phase primal
//! simplex over exact rationals with Bland's anti-cycling rule, plus
//! encoders that write the primal and dual problems in standard form. It
//! deliberately shares no solution logic with [`crate::closed_form`] — the
//! two routes must agree for a certificate to mean anything — and every
//! pivot is exact, so agreement is equality, not approximation.

use num_traits::{One, Signed, Zero};

use crate::matrix::{GeneralMatrix, StochasticMatrix};
use crate::rational::Rational;
use crate::vector::StochasticVector;
use crate::{Error, Result};

/// `maximize objective·x` subject to `rows·x = rhs`, `x ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardFormLp {
    pub objective: Vec<Rational>,
    pub rows: Vec<Vec<Rational>>,
    pub rhs: Vec<Rational>,
}

/// Termination status of the simplex solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solver outcome; `value`, `values`, and `basis` are present exactly when
/// `status` is [`LpStatus::Optimal`]. `basis` lists the basic variable of
/// each surviving constraint row (redundant rows are dropped in phase 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub value: Option<Rational>,
    pub values: Option<Vec<Rational>>,
    pub basis: Option<Vec<usize>>,
}

/// Dual solution recovered by the oracle (decoded from split variables).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleDual {
    pub alpha: Vec<Rational>,
    pub beta: Vec<Rational>,
    pub gamma: GeneralMatrix,
    pub value: Rational,
}

impl StandardFormLp {
    fn validate(&self) -> Result<()> {
        if self.rows.len() != self.rhs.len() {
            return Err(Error::MalformedLp(format!(
                "{} constraint rows but {} right-hand sides",
                self.rows.len(),
                self.rhs.len()
            )));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.objective.len() {
                return Err(Error::MalformedLp(format!(
                    "row {i} has {} coefficients but the objective has {}",
                    row.len(),
                    self.objective.len()
                )));
            }
        }
        Ok(())
    }
}

/// Flat index of primal variable `u_ij` in [`encode_primal`].
pub fn primal_variable_index(n: usize, i: usize, j: usize) -> usize {
    i * n + j
}

/// Encodes `max { tr(U) : Uᵀq = p, U1 = 1, U ≥ 0 }` in standard form.
///
/// Variables are `u_ij` at index `i·n + j` (`n²` in total). The `2n`
/// constraints are the `n` row sums `Σ_j u_ij = 1` followed by the `n`
/// barycenter columns `Σ_i q_i·u_ij = p_j`. One constraint is implied by
/// the others; the solver's phase 1 discards the redundancy.
pub fn encode_primal(p: &StochasticVector, q: &StochasticVector) -> Result<StandardFormLp> {
    let n = p.len();
    if q.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "p has {} entries but q has {}",
            n,
            q.len()
        )));
    }
    let width = n * n;
    let mut objective = vec![Rational::zero(); width];
    for i in 0..n {
        objective[primal_variable_index(n, i, i)] = Rational::one();
    }
    let mut rows = Vec::with_capacity(2 * n);
    let mut rhs = Vec::with_capacity(2 * n);
    for i in 0..n {
        let mut row = vec![Rational::zero(); width];
        for j in 0..n {
            row[primal_variable_index(n, i, j)] = Rational::one();
        }
        rows.push(row);
        rhs.push(Rational::one());
    }
    for j in 0..n {
        let mut row = vec![Rational::zero(); width];
        for i in 0..n {
            row[primal_variable_index(n, i, j)] = q.get(i).clone();
        }
        rows.push(row);
        rhs.push(p.get(j).clone());
    }
    Ok(StandardFormLp { objective, rows, rhs })
}

/// Encodes the dual
/// `min { pᵀα + 1ᵀβ : q_i·α_j + β_i − γ_ij = 1[i = j], Γ ≥ 0 }`
/// in standard form (as maximization of the negated objective).
///
/// The free variables are split: `α⁺` occupies indices `0..n`, `α⁻`
/// `n..2n`, `β⁺` `2n..3n`, `β⁻` `3n..4n`, and `γ_ij` sits at
/// `4n + i·n + j`. Constraint `(i, j)` is row `i·n + j`.
pub fn encode_dual(p: &StochasticVector, q: &StochasticVector) -> Result<StandardFormLp> {
    let n = p.len();
    if q.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "p has {} entries but q has {}",
            n,
            q.len()
        )));
    }
    let width = 4 * n + n * n;
    let mut objective = vec![Rational::zero(); width];
    for j in 0..n {
        objective[j] = -p.get(j); // α⁺
        objective[n + j] = p.get(j).clone(); // α⁻
    }
    for i in 0..n {
        objective[2 * n + i] = -Rational::one(); // β⁺
        objective[3 * n + i] = Rational::one(); // β⁻
    }
    let mut rows = Vec::with_capacity(n * n);
    let mut rhs = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut row = vec![Rational::zero(); width];
            row[j] = q.get(i).clone();
            row[n + j] = -q.get(i);
            row[2 * n + i] = Rational::one();
            row[3 * n + i] = -Rational::one();
            row[4 * n + i * n + j] = -Rational::one();
            rows.push(row);
            rhs.push(if i == j { Rational::one() } else { Rational::zero() });
        }
    }
    Ok(StandardFormLp { objective, rows, rhs })
}

/// One simplex phase with Bland's rule. `tableau` rows have `width + 1`
/// columns (rhs last); `cost` has length `width`. Returns the optimal
/// objective value, or `None` when the phase detects unboundedness.
fn run_phase(
    tableau: &mut [Vec<Rational>],
    basis: &mut [usize],
    cost: &[Rational],
    width: usize,
) -> Option<Rational> {
    let m = tableau.len();
    // Reduced-cost row z_j − c_j with the current basis; rhs slot holds z.
    let mut obj = vec![Rational::zero(); width + 1];
    for (j, slot) in obj.iter_mut().enumerate().take(width) {
        *slot = -cost[j].clone();
    }
    for i in 0..m {
        if !cost[basis[i]].is_zero() {
            let factor = cost[basis[i]].clone();
            for j in 0..=width {
                let inc = &factor * &tableau[i][j];
                obj[j] += inc;
            }
        }
    }

    loop {
        // Bland: entering = smallest index with negative reduced cost.
        let Some(entering) = (0..width).find(|&j| obj[j].is_negative()) else {
            return Some(obj[width].clone());
        };
        // Ratio test; ties broken by smallest basic variable index.
        let mut leave: Option<usize> = None;
        let mut best: Option<Rational> = None;
        for i in 0..m {
            if tableau[i][entering].is_positive() {
                let ratio = &tableau[i][width] / &tableau[i][entering];
                let better = match &best {
                    None => true,
                    Some(b) => ratio < *b || (ratio == *b && basis[i] < basis[leave.unwrap()]),
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let Some(r) = leave else {
            return None; // nothing blocks the entering column
        };
        pivot(tableau, &mut obj, basis, r, entering, width);
    }
}

fn pivot(
    tableau: &mut [Vec<Rational>],
    obj: &mut [Rational],
    basis: &mut [usize],
    r: usize,
    c: usize,
    width: usize,
) {
    let pivot_value = tableau[r][c].clone();
    for cell in tableau[r].iter_mut().take(width + 1) {
        *cell /= &pivot_value;
    }
    // Snapshot the normalized pivot row so other rows can borrow it freely.
    let pivot_row = tableau[r].clone();
    for (i, row) in tableau.iter_mut().enumerate() {
        if i != r && !row[c].is_zero() {
            let factor = row[c].clone();
            for (cell, pivot_cell) in row.iter_mut().zip(&pivot_row).take(width + 1) {
                *cell -= &factor * pivot_cell;
            }
        }
    }
    if !obj[c].is_zero() {
        let factor = obj[c].clone();
        for (cell, pivot_cell) in obj.iter_mut().zip(&pivot_row).take(width + 1) {
            *cell -= &factor * pivot_cell;
        }
    }
    basis[r] = c;
}

/// Two-phase primal simplex over exact rationals with Bland's rule.
///
/// Phase 1 minimizes the sum of one artificial variable per constraint;
/// a positive residual proves infeasibility. Artificials still basic at
/// level zero are pivoted out, and all-zero (redundant) rows are dropped.
/// Phase 2 then maximizes the real objective, reporting unboundedness when
/// an improving column has no blocking row.
pub fn solve(lp: &StandardFormLp) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.objective.len();
    let m = lp.rows.len();

    // Tableau with artificial j at column n + j and the rhs last, signs
    // normalized so every rhs is nonnegative.
    let mut tableau: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for i in 0..m {
        let negate = lp.rhs[i].is_negative();
        let mut row: Vec<Rational> = lp.rows[i]
            .iter()
            .map(|a| if negate { -a } else { a.clone() })
            .collect();
        row.extend((0..m).map(|j| {
            if j == i {
                Rational::one()
            } else {
                Rational::zero()
            }
        }));
        row.push(if negate { -&lp.rhs[i] } else { lp.rhs[i].clone() });
        tableau.push(row);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    let mut phase1_cost = vec![Rational::zero(); n + m];
    for slot in phase1_cost.iter_mut().skip(n) {
        *slot = -Rational::one();
    }
    let z1 = run_phase(&mut tableau, &mut basis, &phase1_cost, n + m)
        .expect("phase 1 objective is bounded above by zero");
    if z1.is_negative() {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            value: None,
            values: None,
            basis: None,
        });
    }

    // Pivot lingering artificials (necessarily at level zero) onto real
    // columns; a row with no real coefficient left is redundant.
    let mut drop_rows = Vec::new();
    for r in 0..tableau.len() {
        if basis[r] >= n {
            match (0..n).find(|&c| !tableau[r][c].is_zero()) {
                Some(c) => {
                    let mut no_obj = vec![Rational::zero(); n + m + 1];
                    pivot(&mut tableau, &mut no_obj, &mut basis, r, c, n + m);
                }
                None => drop_rows.push(r),
            }
        }
    }
    for &r in drop_rows.iter().rev() {
        tableau.remove(r);
        basis.remove(r);
    }
    // Artificial columns are dead from here on.
    for row in tableau.iter_mut() {
        let rhs = row.pop().expect("row has an rhs");
        row.truncate(n);
        row.push(rhs);
    }

    match run_phase(&mut tableau, &mut basis, &lp.objective, n) {
        None => Ok(LpSolution {
            status: LpStatus::Unbounded,
            value: None,
            values: None,
            basis: None,
        }),
        Some(z) => {
            let mut values = vec![Rational::zero(); n];
            for (i, &b) in basis.iter().enumerate() {
                values[b] = tableau[i][n].clone();
            }
            Ok(LpSolution {
                status: LpStatus::Optimal,
                value: Some(z),
                values: Some(values),
                basis: Some(basis),
            })
        }
    }
}

/// Solves the primal by simplex and decodes the optimal matrix.
pub fn solve_primal(
    p: &StochasticVector,
    q: &StochasticVector,
) -> Result<(Rational, StochasticMatrix)> {
    let n = p.len();
    let solution = solve(&encode_primal(p, q)?)?;
    assert_eq!(
        solution.status,
        LpStatus::Optimal,
        "the candidate set is nonempty and compact"
    );
    let values = solution.values.expect("optimal solution carries values");
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        rows.push(values[primal_variable_index(n, i, 0)..primal_variable_index(n, i, 0) + n].to_vec());
    }
    let matrix = StochasticMatrix::from_rows(rows)?;
    Ok((solution.value.expect("optimal solution carries a value"), matrix))
}

/// Solves the dual by simplex and decodes `(α, β, Γ)`; `value` is the
/// minimized `pᵀα + 1ᵀβ`.
pub fn solve_dual(p: &StochasticVector, q: &StochasticVector) -> Result<OracleDual> {
    let n = p.len();
    let solution = solve(&encode_dual(p, q)?)?;
    assert_eq!(
        solution.status,
        LpStatus::Optimal,
        "the dual of a solvable LP is solvable"
    );
    let x = solution.values.expect("optimal solution carries values");
    let alpha: Vec<Rational> = (0..n).map(|j| &x[j] - &x[n + j]).collect();
    let beta: Vec<Rational> = (0..n).map(|i| &x[2 * n + i] - &x[3 * n + i]).collect();
    let mut gamma = GeneralMatrix::zero(n);
    for i in 0..n {
        for j in 0..n {
            gamma.set(i, j, x[4 * n + i * n + j].clone());
        }
    }
    let value = -solution.value.expect("optimal solution carries a value");
    Ok(OracleDual { alpha, beta, gamma, value })
}
