//! Closed-form primal optimum `Ū`, its inverse `V̄`, the dual triple,
//! uniqueness analysis with a constructive witness, eigenvalues, and
//! matrix-class verdicts.
//!
//! With `r_i = p_i/q_i` and `D = Σ_k [p_k − q_k]⁺`, the optimum of
//! `max { tr(U) : Uᵀq = p, U1 = 1, U ≥ 0 }` is
//!
//! ```text
//! ū_ii = 1 − [1 − r_i]⁺ = min{r_i, 1}
//! ū_ij = [1 − r_i]⁺ · [p_j − q_j]⁺ / D   (i ≠ j, p ≠ q; 0 when p = q)
//! ```
//!
//! Its inverse swaps the clamp direction: `v̄_ii = 1 − [1 − q_i/p_i]⁻`,
//! `v̄_ij = [1 − q_i/p_i]⁻ · [p_j − q_j]⁺ / D`. The dual triple is
//! `ᾱ_j = 1[p_j < q_j]/q_j`, `β̄_i = 1[p_i ≥ q_i]`,
//! `γ̄_ij = 1[p_i ≥ q_i] + 1[p_j < q_j]·q_i/q_j − 1[i = j]`.

use num_traits::{One, Signed, Zero};

use crate::matrix::{determinant, mat_mul, transpose_map, GeneralMatrix, StochasticMatrix};
use crate::rational::{neg_part, pos_part, Rational};
use crate::vector::StochasticVector;
use crate::{trace, Error, Result};

/// Three-way index classification: `greater` holds `i` with `p_i > q_i`,
/// `equal` with `p_i = q_i`, `less` with `p_i < q_i`. Indices are 0-based
/// and ascending within each class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexPartition {
    pub greater: Vec<usize>,
    pub equal: Vec<usize>,
    pub less: Vec<usize>,
}

/// The dual triple `(ᾱ, β̄, Γ̄)` with its objective value `ᾱᵀp + β̄ᵀ1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualSolution {
    pub alpha: Vec<Rational>,
    pub beta: Vec<Rational>,
    pub gamma: GeneralMatrix,
    pub objective: Rational,
}

/// Constructive non-uniqueness witness: `alternate = Ū + step·direction`
/// is feasible, trace-equal, and distinct from `Ū`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniquenessWitness {
    pub direction: GeneralMatrix,
    pub step: Rational,
    pub alternate: StochasticMatrix,
}

/// Verdict of the uniqueness theorem: `Ū` is the unique optimum iff
/// `|G| ≤ 1` or `|L| ≤ 1` (in particular, always for `n ≤ 3`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniquenessReport {
    pub unique: bool,
    pub partition: IndexPartition,
    pub witness: Option<UniquenessWitness>,
}

/// Exact checks behind the matrix-class verdicts: `V̄` is a Z-matrix and an
/// M-matrix, hence `Ū` is an inverse M-matrix. Violation lists are empty
/// exactly when the corresponding verdict holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationReport {
    /// Off-diagonal entries of `V̄` are all ≤ 0.
    pub v_is_z_matrix: bool,
    /// `V̄` is a nonsingular Z-matrix with nonnegative inverse.
    pub v_is_m_matrix: bool,
    /// `Ū` is the inverse of the M-matrix `V̄`.
    pub u_is_inverse_m_matrix: bool,
    /// Nonsingularity witness for `V̄`.
    pub v_determinant: Rational,
    /// Positions of positive off-diagonal entries of `V̄` (Z violations).
    pub positive_off_diagonal: Vec<(usize, usize)>,
    /// Positions of negative entries of `V̄⁻¹ = Ū` (inverse-sign violations).
    pub negative_inverse_entries: Vec<(usize, usize)>,
    /// `ŪV̄ = V̄Ū = I` verified exactly.
    pub products_are_identity: bool,
}

fn conforming(p: &StochasticVector, q: &StochasticVector) -> Result<usize> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(format!(
            "p has {} entries but q has {}",
            p.len(),
            q.len()
        )));
    }
    Ok(p.len())
}

/// Classifies every index by the sign of `p_i − q_i`.
pub fn index_partition(p: &StochasticVector, q: &StochasticVector) -> Result<IndexPartition> {
    let n = conforming(p, q)?;
    let mut part = IndexPartition {
        greater: Vec::new(),
        equal: Vec::new(),
        less: Vec::new(),
    };
    for i in 0..n {
        match p.get(i).cmp(q.get(i)) {
            std::cmp::Ordering::Greater => part.greater.push(i),
            std::cmp::Ordering::Equal => part.equal.push(i),
            std::cmp::Ordering::Less => part.less.push(i),
        }
    }
    Ok(part)
}

/// Sum of positive excesses `D = Σ_k [p_k − q_k]⁺`; zero iff `p = q`.
fn excess_denominator(p: &StochasticVector, q: &StochasticVector) -> Rational {
    p.iter()
        .zip(q.iter())
        .map(|(pi, qi)| pos_part(&(pi - qi)))
        .sum()
}

/// Builds the closed-form optimum `Ū`.
pub fn build_optimal_primal(
    p: &StochasticVector,
    q: &StochasticVector,
) -> Result<StochasticMatrix> {
    let n = conforming(p, q)?;
    let d = excess_denominator(p, q);
    let mut u = GeneralMatrix::zero(n);
    for i in 0..n {
        let ratio = p.get(i) / q.get(i);
        let slack = pos_part(&(Rational::one() - &ratio));
        u.set(i, i, Rational::one() - &slack);
        if slack.is_zero() || d.is_zero() {
            continue;
        }
        for j in 0..n {
            if j != i {
                let excess = pos_part(&(p.get(j) - q.get(j)));
                if !excess.is_zero() {
                    u.set(i, j, &slack * excess / &d);
                }
            }
        }
    }
    let u = StochasticMatrix::new(u).expect("closed-form optimum is feasible by construction");
    debug_assert_eq!(transpose_map(&u, q).unwrap(), p.as_slice());
    Ok(u)
}

/// Builds `V̄ = Ū⁻¹` in closed form and verifies the inverse-pair
/// identities exactly: `ŪV̄ = V̄Ū = I`, `V̄1 = 1`, and `V̄ᵀp = q`.
///
/// The mapping identity follows the orientation forced by `Ūᵀq = p`:
/// transposing `V̄Ū = I` against `q` gives `V̄ᵀ(Ūᵀq) = V̄ᵀp = q`. (The
/// transpose of `V̄` applied to `q` itself is *not* `p` in general.)
pub fn build_inverse(p: &StochasticVector, q: &StochasticVector) -> Result<GeneralMatrix> {
    let n = conforming(p, q)?;
    let d = excess_denominator(p, q);
    let mut v = GeneralMatrix::zero(n);
    for i in 0..n {
        let inv_ratio = q.get(i) / p.get(i);
        let hang = neg_part(&(Rational::one() - &inv_ratio)); // ≤ 0
        v.set(i, i, Rational::one() - &hang); // = max{q_i/p_i, 1}
        if hang.is_zero() || d.is_zero() {
            continue;
        }
        for j in 0..n {
            if j != i {
                let excess = pos_part(&(p.get(j) - q.get(j)));
                if !excess.is_zero() {
                    v.set(i, j, &hang * excess / &d);
                }
            }
        }
    }

    let u = build_optimal_primal(p, q)?;
    let identity = GeneralMatrix::identity(n);
    assert_eq!(mat_mul(u.as_general(), &v)?, identity, "UV != I");
    assert_eq!(mat_mul(&v, u.as_general())?, identity, "VU != I");
    let ones = vec![Rational::one(); n];
    assert_eq!(v.mat_vec(&ones)?, ones, "V1 != 1");
    assert_eq!(
        v.transpose().mat_vec(p.as_slice())?,
        q.as_slice(),
        "transpose(V)p != q"
    );
    Ok(v)
}

/// Builds the closed-form dual triple; `objective = ᾱᵀp + β̄ᵀ1 = tr(Ū)`.
pub fn build_dual(p: &StochasticVector, q: &StochasticVector) -> Result<DualSolution> {
    let n = conforming(p, q)?;
    let mut alpha = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    for i in 0..n {
        if p.get(i) < q.get(i) {
            alpha.push(q.get(i).recip());
            beta.push(Rational::zero());
        } else {
            alpha.push(Rational::zero());
            beta.push(Rational::one());
        }
    }
    let mut gamma = GeneralMatrix::zero(n);
    for i in 0..n {
        for j in 0..n {
            // γ̄_ij = 1[p_i ≥ q_i] + 1[p_j < q_j]·q_i/q_j − 1[i = j]
            let mut g = Rational::zero();
            if p.get(i) >= q.get(i) {
                g += Rational::one();
            }
            if p.get(j) < q.get(j) {
                g += q.get(i) / q.get(j);
            }
            if i == j {
                g -= Rational::one();
            }
            gamma.set(i, j, g);
        }
    }
    let objective: Rational = alpha
        .iter()
        .zip(p.iter())
        .map(|(a, pi)| a * pi)
        .sum::<Rational>()
        + beta.iter().sum::<Rational>();

    let u = build_optimal_primal(p, q)?;
    assert_eq!(objective, trace(u.as_general()), "dual objective != tr(U)");
    Ok(DualSolution {
        alpha,
        beta,
        gamma,
        objective,
    })
}

/// Eigenvalues of `Ū` (or of `V̄` when `of_inverse` is set): exactly the
/// diagonal, in diagonal order. Verified by sampling the characteristic
/// identity `det(M − λI) = Π_i (m_ii − λ)` at `λ = 0, 1, …, n`.
pub fn eigenvalues(
    p: &StochasticVector,
    q: &StochasticVector,
    of_inverse: bool,
) -> Result<Vec<Rational>> {
    let n = conforming(p, q)?;
    let m = if of_inverse {
        build_inverse(p, q)?
    } else {
        build_optimal_primal(p, q)?.into_general()
    };
    let diag: Vec<Rational> = (0..n).map(|i| m.get(i, i).clone()).collect();
    // A degree-n polynomial identity holding at n+1 distinct points holds
    // everywhere.
    for lambda in 0..=n {
        let lam = Rational::from_integer(lambda.into());
        let mut shifted = m.clone();
        for i in 0..n {
            let v = shifted.get(i, i) - &lam;
            shifted.set(i, i, v);
        }
        let lhs = determinant(&shifted);
        let rhs: Rational = diag.iter().map(|d| d - &lam).product();
        assert_eq!(lhs, rhs, "characteristic identity failed at lambda = {lambda}");
    }
    Ok(diag)
}

/// Certifies the matrix classes: `V̄` is a Z-matrix and an M-matrix, and
/// `Ū` is accordingly an inverse M-matrix. All checks are exact.
pub fn classify(p: &StochasticVector, q: &StochasticVector) -> Result<ClassificationReport> {
    let n = conforming(p, q)?;
    let u = build_optimal_primal(p, q)?;
    let v = build_inverse(p, q)?;

    let mut positive_off_diagonal = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && v.get(i, j).is_positive() {
                positive_off_diagonal.push((i, j));
            }
        }
    }
    let v_is_z_matrix = positive_off_diagonal.is_empty();

    let v_determinant = determinant(&v);
    let identity = GeneralMatrix::identity(n);
    let products_are_identity = mat_mul(u.as_general(), &v)? == identity
        && mat_mul(&v, u.as_general())? == identity;

    // With V̄Ū = I verified, V̄⁻¹ = Ū; the M-matrix sign condition is
    // nonnegativity of that inverse.
    let mut negative_inverse_entries = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if u.get(i, j).is_negative() {
                negative_inverse_entries.push((i, j));
            }
        }
    }
    let v_is_m_matrix = v_is_z_matrix
        && !v_determinant.is_zero()
        && products_are_identity
        && negative_inverse_entries.is_empty();

    Ok(ClassificationReport {
        v_is_z_matrix,
        v_is_m_matrix,
        u_is_inverse_m_matrix: v_is_m_matrix,
        v_determinant,
        positive_off_diagonal,
        negative_inverse_entries,
        products_are_identity,
    })
}

/// Applies the uniqueness theorem and, when `Ū` is not uniquely optimal,
/// constructs an alternate optimum.
///
/// Witness (the feasible direction from the theorem's proof): take
/// `i < i′` the two smallest indices of `L` and `j < j′` the two smallest
/// of `G`, set `ũ_ij = q_i′`, `ũ_ij′ = −q_i′`, `ũ_i′j = −q_i`,
/// `ũ_i′j′ = q_i` (zeros elsewhere), and step by the largest feasible
/// `ε = min{ū_ij′/q_i′, ū_i′j/q_i}`, zeroing at least one entry. All four
/// touched entries of `Ū` are strictly positive, so `ε > 0` and
/// `Ū + εŨ ≠ Ū`.
pub fn uniqueness(p: &StochasticVector, q: &StochasticVector) -> Result<UniquenessReport> {
    let n = conforming(p, q)?;
    let partition = index_partition(p, q)?;
    let unique = partition.greater.len() <= 1 || partition.less.len() <= 1;
    if unique {
        return Ok(UniquenessReport {
            unique,
            partition,
            witness: None,
        });
    }

    let (i, i2) = (partition.less[0], partition.less[1]);
    let (j, j2) = (partition.greater[0], partition.greater[1]);
    let mut direction = GeneralMatrix::zero(n);
    direction.set(i, j, q.get(i2).clone());
    direction.set(i, j2, -q.get(i2));
    direction.set(i2, j, -q.get(i));
    direction.set(i2, j2, q.get(i).clone());

    let u = build_optimal_primal(p, q)?;
    let step = std::cmp::min(u.get(i, j2) / q.get(i2), u.get(i2, j) / q.get(i));
    let mut alt = u.as_general().clone();
    for r in [i, i2] {
        for c in [j, j2] {
            let v = alt.get(r, c) + &step * direction.get(r, c);
            alt.set(r, c, v);
        }
    }
    let alternate =
        StochasticMatrix::new(alt).expect("alternate optimum is feasible by construction");
    assert_eq!(
        trace(alternate.as_general()),
        trace(u.as_general()),
        "alternate trace differs"
    );
    assert_eq!(transpose_map(&alternate, q)?, p.as_slice());
    assert_ne!(alternate, u, "witness step must move off the optimum");
    Ok(UniquenessReport {
        unique,
        partition,
        witness: Some(UniquenessWitness {
            direction,
            step,
            alternate,
        }),
    })
}
