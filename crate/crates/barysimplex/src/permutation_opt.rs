//! The permutation-relaxed problem: `max { tr(MU) : M ∈ 𝒫, U ∈ 𝒰 }` over
//! permutation matrices `M`.
//!
//! For fixed `M` with row reading `τ` (`m_{i,τ(i)} = 1`), substituting
//! `W = MU` turns the inner problem into the plain trace maximization over
//! `𝒰(p, q∘τ)`, whose optimum is `Σ_k min{p_k/q_τ(k), 1}`. Re-indexing by
//! `σ = τ⁻¹` shows the outer search is the assignment problem with costs
//! `c_ij = min{p_j/q_i, 1}`: an optimal assignment `σ̂` (row `i` takes
//! column `σ̂(i)`) yields the optimal `M̂` with row reading `σ̂⁻¹`, and the
//! attaining `Û = M̂ᵀW` is `W = build_optimal_primal(p, q∘σ̂⁻¹)` with its
//! rows permuted back (`Û` row `i` is `W` row `σ̂(i)`).
//!
//! That re-assembly convention is frozen here and guarded twice: every
//! solve verifies `Û ∈ 𝒰` and `tr(M̂Û) =` assignment optimum exactly, and
//! for `n ≤ 6` additionally cross-checks the optimum against a brute-force
//! scan of all `n!` row readings.

use num_traits::{One, Signed, Zero};

use crate::closed_form::build_optimal_primal;
use crate::kkt::is_member;
use crate::matrix::{determinant, GeneralMatrix, StochasticMatrix};
use crate::rational::{pos_part, Rational};
use crate::vector::{validate_stochastic_vector, StochasticVector};
use crate::{trace, Error, Result};

/// A permutation of `{0, …, n−1}`; `mapping[i]` is the column of the 1 in
/// row `i` of the corresponding permutation matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    /// Wraps a mapping, checking it is a bijection on `{0, …, n−1}`.
    pub fn from_mapping(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &j in &mapping {
            if j >= n || seen[j] {
                return Err(Error::DimensionMismatch(format!(
                    "mapping {mapping:?} is not a bijection on 0..{n}"
                )));
            }
            seen[j] = true;
        }
        Ok(Self { mapping })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            mapping: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    /// Row reading: the column of the 1 in row `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.mapping[i]
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.mapping.len()];
        for (i, &j) in self.mapping.iter().enumerate() {
            inv[j] = i;
        }
        Self { mapping: inv }
    }

    /// The permutation matrix with `mapping`'s row reading.
    pub fn matrix(&self) -> StochasticMatrix {
        let n = self.mapping.len();
        let mut m = GeneralMatrix::zero(n);
        for (i, &j) in self.mapping.iter().enumerate() {
            m.set(i, j, Rational::one());
        }
        StochasticMatrix::new(m).expect("a permutation matrix is stochastic")
    }
}

/// Solution of the permutation-relaxed problem with comparison diagnostics
/// against the base optimum `Ū`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermOptResult {
    pub m_hat: Permutation,
    pub u_hat: StochasticMatrix,
    /// `tr(M̂Û)`, the relaxed optimum.
    pub trace_perm: Rational,
    /// `tr(Ū)`, the base optimum.
    pub trace_base: Rational,
    pub absdet_perm: Rational,
    pub absdet_base: Rational,
}

/// Assignment costs `c_ij = 1 − [1 − p_j/q_i]⁺ = min{p_j/q_i, 1}`.
pub fn assignment_costs(p: &StochasticVector, q: &StochasticVector) -> Result<GeneralMatrix> {
    let n = p.len();
    if q.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "p has {} entries but q has {}",
            n,
            q.len()
        )));
    }
    let mut costs = GeneralMatrix::zero(n);
    for i in 0..n {
        for j in 0..n {
            let ratio = p.get(j) / q.get(i);
            costs.set(i, j, Rational::one() - pos_part(&(Rational::one() - ratio)));
        }
    }
    Ok(costs)
}

/// Exact shortest-augmenting-path assignment (minimization) with
/// potentials; `O(n³)`. Returns the minimal total cost.
fn min_assignment_value(cost: &[Vec<Rational>]) -> Rational {
    let n = cost.len();
    if n == 0 {
        return Rational::zero();
    }
    // 1-based arrays; column 0 is the virtual root of each augmenting tree.
    let mut u = vec![Rational::zero(); n + 1];
    let mut v = vec![Rational::zero(); n + 1];
    let mut matched = vec![0usize; n + 1]; // matched[j] = row occupying column j
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched[0] = i;
        let mut j0 = 0usize;
        let mut minv: Vec<Option<Rational>> = vec![None; n + 1]; // None = +∞
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched[j0];
            let mut j1 = 0usize;
            let mut delta: Option<Rational> = None;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = &cost[i0 - 1][j - 1] - &u[i0] - &v[j];
                if minv[j].as_ref().map_or(true, |m| cur < *m) {
                    minv[j] = Some(cur);
                    way[j] = j0;
                }
                if delta.is_none()
                    || minv[j]
                        .as_ref()
                        .is_some_and(|m| m < delta.as_ref().unwrap())
                {
                    delta = minv[j].clone();
                    j1 = j;
                }
            }
            let delta = delta.expect("an unmatched column is always reachable");
            for j in 0..=n {
                if used[j] {
                    u[matched[j]] += &delta;
                    v[j] -= &delta;
                } else if let Some(m) = &mut minv[j] {
                    *m -= &delta;
                }
            }
            j0 = j1;
            if matched[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched[j0] = matched[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut total = Rational::zero();
    for j in 1..=n {
        total += &cost[matched[j] - 1][j - 1];
    }
    total
}

/// Maximizing assignment with a deterministic tie-break: among all optimal
/// permutations, the lexicographically smallest `σ` (compared as the
/// sequence `σ(0), σ(1), …`). Found by fixing the prefix greedily and
/// re-solving the remaining subproblem exactly at each step.
pub fn solve_assignment(costs: &GeneralMatrix) -> Permutation {
    let n = costs.n();
    // Minimize the negated costs.
    let neg: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| -costs.get(i, j)).collect())
        .collect();
    let optimum = min_assignment_value(&neg);

    let mut used = vec![false; n];
    let mut mapping = Vec::with_capacity(n);
    let mut prefix = Rational::zero();
    for i in 0..n {
        let mut chosen = None;
        for j in 0..n {
            if used[j] {
                continue;
            }
            let free: Vec<usize> = (0..n).filter(|&c| !used[c] && c != j).collect();
            let sub: Vec<Vec<Rational>> = (i + 1..n)
                .map(|r| free.iter().map(|&c| neg[r][c].clone()).collect())
                .collect();
            let completion = min_assignment_value(&sub);
            if &prefix + &neg[i][j] + completion == optimum {
                chosen = Some(j);
                break;
            }
        }
        let j = chosen.expect("an optimal completion exists for some column");
        prefix += &neg[i][j];
        used[j] = true;
        mapping.push(j);
    }
    Permutation::from_mapping(mapping).expect("greedy construction is a bijection")
}

fn permute_vector(q: &StochasticVector, tau: &Permutation) -> StochasticVector {
    validate_stochastic_vector(
        tau.mapping()
            .iter()
            .map(|&k| q.get(k).clone())
            .collect(),
    )
    .expect("a permuted stochastic vector is stochastic")
}

/// All row readings of length `n`, in lexicographic order.
fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(n: usize, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                current.push(j);
                rec(n, current, used, out);
                current.pop();
                used[j] = false;
            }
        }
    }
    rec(n, &mut current, &mut used, &mut out);
    out
}

/// Solves the permutation-relaxed problem end to end.
pub fn solve_p_perm(p: &StochasticVector, q: &StochasticVector) -> Result<PermOptResult> {
    let n = p.len();
    let costs = assignment_costs(p, q)?;
    let sigma_hat = solve_assignment(&costs);
    let tau = sigma_hat.inverse(); // row reading of M̂

    let w = build_optimal_primal(p, &permute_vector(q, &tau))?;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        rows.push(w.row(sigma_hat.apply(i)).to_vec());
    }
    let u_hat = StochasticMatrix::from_rows(rows)?;

    let trace_perm: Rational = (0..n)
        .map(|i| costs.get(i, sigma_hat.apply(i)).clone())
        .sum();
    // Mandatory exact verifications of the frozen assembly convention.
    let direct: Rational = (0..n).map(|i| u_hat.get(tau.apply(i), i).clone()).sum();
    assert_eq!(direct, trace_perm, "tr(M̂Û) must equal the assignment optimum");
    assert!(
        is_member(u_hat.as_general(), p, q)?,
        "Û must lie in the candidate set"
    );
    if n <= 6 {
        let brute = all_permutations(n)
            .into_iter()
            .map(|rows_of_m| {
                let t = Permutation::from_mapping(rows_of_m).expect("enumerated bijection");
                let inner = build_optimal_primal(p, &permute_vector(q, &t))
                    .expect("dimensions conform");
                trace(inner.as_general())
            })
            .max()
            .expect("n ≥ 1 yields at least one permutation");
        assert_eq!(brute, trace_perm, "assignment optimum must match brute force");
    }

    let u_base = build_optimal_primal(p, q)?;
    Ok(PermOptResult {
        m_hat: tau,
        u_hat: u_hat.clone(),
        trace_perm,
        trace_base: trace(u_base.as_general()),
        absdet_perm: determinant(u_hat.as_general()).abs(),
        absdet_base: determinant(u_base.as_general()).abs(),
    })
}

/// The rows of `U` as a barycentric vertex list (plot payload): row `i`
/// is the `i`-th vertex of the image simplex.
pub fn simplex_vertices(u: &StochasticMatrix) -> Vec<Vec<Rational>> {
    (0..u.n()).map(|i| u.row(i).to_vec()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp_oracle::{solve, LpStatus};
    use crate::rational::rat;
    use crate::test_support::{assignment_relaxation_lp, random_stochastic_vector};
    use itertools::Itertools;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sv(entries: &[(i64, i64)]) -> StochasticVector {
        validate_stochastic_vector(entries.iter().map(|&(a, b)| rat(a, b)).collect()).unwrap()
    }

    fn p3() -> StochasticVector {
        sv(&[(3, 10), (2, 5), (1, 10), (1, 5)])
    }
    fn q3() -> StochasticVector {
        sv(&[(1, 8), (3, 8), (3, 10), (1, 5)])
    }
    fn p4() -> StochasticVector {
        sv(&[(1, 4), (1, 4), (1, 4), (1, 4)])
    }
    fn q4() -> StochasticVector {
        sv(&[(1, 3), (1, 9), (1, 2), (1, 18)])
    }

    #[test]
    fn cost_examples() {
        let p = sv(&[(1, 2), (1, 3), (1, 6)]);
        let c = assignment_costs(&p, &p).unwrap();
        for i in 0..3 {
            assert_eq!(c.get(i, i), &rat(1, 1));
        }
        let c3 = assignment_costs(&p3(), &q3()).unwrap();
        assert_eq!(c3.get(2, 0), &rat(1, 1)); // min{(3/10)/(3/10), 1}
        assert_eq!(c3.get(0, 2), &rat(4, 5)); // min{(1/10)/(1/8), 1}
    }

    #[test]
    fn identity_costs_pick_identity() {
        let sigma = solve_assignment(&GeneralMatrix::identity(4));
        assert_eq!(sigma.mapping(), &[0, 1, 2, 3]);
    }

    #[test]
    fn assignment_on_worked_instance() {
        let costs = assignment_costs(&p3(), &q3()).unwrap();
        let sigma = solve_assignment(&costs);
        assert_eq!(sigma.mapping(), &[2, 1, 0, 3]);
    }

    #[test]
    fn lexicographic_tie_break() {
        // All-equal costs: every permutation is optimal; lex smallest wins.
        let mut flat = GeneralMatrix::zero(4);
        for i in 0..4 {
            for j in 0..4 {
                flat.set(i, j, rat(1, 2));
            }
        }
        assert_eq!(solve_assignment(&flat).mapping(), &[0, 1, 2, 3]);

        // Two optima of equal value 4, {0→0, 1→1} (1 + 3) and {0→1, 1→0}
        // (2 + 2): prefer the one starting with the smaller image.
        let mut tied = GeneralMatrix::zero(2);
        tied.set(0, 0, rat(1, 1));
        tied.set(0, 1, rat(2, 1));
        tied.set(1, 0, rat(2, 1));
        tied.set(1, 1, rat(3, 1));
        assert_eq!(solve_assignment(&tied).mapping(), &[0, 1]);
    }

    #[test]
    fn solves_worked_instance() {
        let result = solve_p_perm(&p3(), &q3()).unwrap();
        assert_eq!(result.m_hat.mapping(), &[2, 1, 0, 3]);
        assert_eq!(result.trace_perm, rat(19, 5));
        assert_eq!(result.trace_base, rat(10, 3));
        assert_eq!(result.absdet_perm, rat(4, 5));
        assert_eq!(result.absdet_base, rat(1, 3));
        let expected_u_hat = StochasticMatrix::from_rows(vec![
            vec![rat(0, 1), rat(1, 5), rat(4, 5), rat(0, 1)],
            vec![rat(0, 1), rat(1, 1), rat(0, 1), rat(0, 1)],
            vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1)],
            vec![rat(0, 1), rat(0, 1), rat(0, 1), rat(1, 1)],
        ])
        .unwrap();
        assert_eq!(result.u_hat, expected_u_hat);
    }

    #[test]
    fn equal_vectors_yield_identity() {
        let p = sv(&[(2, 5), (2, 5), (1, 5)]);
        let result = solve_p_perm(&p, &p).unwrap();
        assert_eq!(result.m_hat.mapping(), &[0, 1, 2]);
        assert_eq!(result.u_hat, StochasticMatrix::identity(3));
        assert_eq!(result.trace_perm, rat(3, 1));
        assert_eq!(result.trace_base, rat(3, 1));
    }

    #[test]
    fn uniform_p_ties_resolve_to_identity() {
        // With uniform p every cost row is constant, so all n! assignments
        // tie and the lexicographic rule returns the identity; the relaxed
        // problem then cannot beat the base optimum.
        let result = solve_p_perm(&p4(), &q4()).unwrap();
        assert_eq!(result.m_hat.mapping(), &[0, 1, 2, 3]);
        assert_eq!(result.u_hat, build_optimal_primal(&p4(), &q4()).unwrap());
        assert_eq!(result.trace_perm, rat(13, 4));
        assert_eq!(result.trace_base, rat(13, 4));
    }

    #[test]
    fn relaxation_dominance_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..60 {
            let n = rng.random_range(1..=5);
            let p = random_stochastic_vector(&mut rng, n, 40);
            let q = random_stochastic_vector(&mut rng, n, 40);
            let result = solve_p_perm(&p, &q).unwrap();
            assert!(result.trace_perm >= result.trace_base);
            assert!(is_member(result.u_hat.as_general(), &p, &q).unwrap());
        }
    }

    #[test]
    fn assignment_matches_lp_relaxation() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for _ in 0..30 {
            let n = rng.random_range(1..=5);
            let p = random_stochastic_vector(&mut rng, n, 40);
            let q = random_stochastic_vector(&mut rng, n, 40);
            let costs = assignment_costs(&p, &q).unwrap();
            let sigma = solve_assignment(&costs);
            let combinatorial: Rational = (0..n)
                .map(|i| costs.get(i, sigma.apply(i)).clone())
                .sum();
            let lp = assignment_relaxation_lp(&costs);
            let solution = solve(&lp).unwrap();
            assert_eq!(solution.status, LpStatus::Optimal);
            assert_eq!(solution.value.unwrap(), combinatorial);
        }
    }

    #[test]
    fn trace_matches_external_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..20 {
            let n = rng.random_range(2..=4);
            let p = random_stochastic_vector(&mut rng, n, 30);
            let q = random_stochastic_vector(&mut rng, n, 30);
            let result = solve_p_perm(&p, &q).unwrap();
            let brute = (0..n)
                .permutations(n)
                .map(|rows_of_m| {
                    let t = Permutation::from_mapping(rows_of_m).unwrap();
                    let inner = build_optimal_primal(&p, &permute_vector(&q, &t)).unwrap();
                    trace(inner.as_general())
                })
                .max()
                .unwrap();
            assert_eq!(result.trace_perm, brute);
        }
    }

    #[test]
    fn vertices_are_rows() {
        let id = StochasticMatrix::identity(3);
        let vertices = simplex_vertices(&id);
        assert_eq!(vertices[0], vec![rat(1, 1), rat(0, 1), rat(0, 1)]);
        assert_eq!(vertices[2], vec![rat(0, 1), rat(0, 1), rat(1, 1)]);

        let u = build_optimal_primal(&p3(), &q3()).unwrap();
        assert_eq!(
            simplex_vertices(&u)[2],
            vec![rat(7, 12), rat(1, 12), rat(1, 3), rat(0, 1)]
        );
        let result = solve_p_perm(&p3(), &q3()).unwrap();
        assert_eq!(
            simplex_vertices(&result.u_hat)[0],
            vec![rat(0, 1), rat(1, 5), rat(4, 5), rat(0, 1)]
        );
    }

    #[test]
    fn permutation_type_round_trips() {
        let sigma = Permutation::from_mapping(vec![2, 0, 1]).unwrap();
        assert_eq!(sigma.inverse().mapping(), &[1, 2, 0]);
        assert_eq!(sigma.inverse().inverse(), sigma);
        let m = sigma.matrix();
        assert_eq!(m.get(0, 2), &rat(1, 1));
        assert_eq!(m.get(1, 0), &rat(1, 1));
        assert!(Permutation::from_mapping(vec![0, 0, 1]).is_err());
        assert!(Permutation::from_mapping(vec![0, 3, 1]).is_err());
        assert_eq!(Permutation::identity(3).mapping(), &[0, 1, 2]);
    }

    #[test]
    fn hungarian_agrees_with_enumeration_on_random_costs() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        for _ in 0..40 {
            let n = rng.random_range(1..=5);
            let mut costs = GeneralMatrix::zero(n);
            for i in 0..n {
                for j in 0..n {
                    costs.set(i, j, rat(rng.random_range(-30..=30), rng.random_range(1..=9)));
                }
            }
            let sigma = solve_assignment(&costs);
            let value: Rational = (0..n).map(|i| costs.get(i, sigma.apply(i)).clone()).sum();
            let best = (0..n)
                .permutations(n)
                .map(|perm| {
                    (0..n)
                        .map(|i| costs.get(i, perm[i]).clone())
                        .sum::<Rational>()
                })
                .max()
                .unwrap();
            assert_eq!(value, best);
            // Lexicographic minimality among the optima.
            let lex_smallest = (0..n)
                .permutations(n)
                .filter(|perm| {
                    (0..n)
                        .map(|i| costs.get(i, perm[i]).clone())
                        .sum::<Rational>()
                        == best
                })
                .min()
                .unwrap();
            assert_eq!(sigma.mapping(), lex_smallest.as_slice());
        }
    }
}
