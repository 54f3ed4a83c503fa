//! Coherent conditional-CDF synthesis.
//!
//! A transformation family `S(z) = (S_1(z), …, S_n(z))` on `[0, 1]` is
//! *coherent* for weights `q` when every `S_i` is a CDF-like transform
//! (`S_i(0) = 0`, `S_i(1) = 1`, nondecreasing) and the weighted mixture
//! reproduces the identity, `qᵀs(z) = z` — the law of total probability
//! for the synthesized conditionals `F(x | Y = i) = S_i(F(x))`.
//!
//! Two built-in families are coherent for *equal* weights: uniform
//! segments (`S_i(z) = clamp(nz − (i−1), 0, 1)`) and the beta family
//! (`S_i(z) = I_z(i, n−i+1)`, the regularized incomplete beta, evaluated
//! in the cancellation-free binomial-tail form). Mapping a family through
//! a matrix in the candidate set (`t(z) = U·s(z)` with `Uᵀq = p`)
//! transports coherence from source weights `p` to target weights `q`.
//!
//! This is the crate's only floating-point module; rationals cross into
//! floats exactly once, at [`apply_matrix`].

use num_traits::ToPrimitive;

use crate::matrix::StochasticMatrix;
use crate::rational::Rational;
use crate::{Error, Result};

/// Default tolerance for coherence verdicts.
pub const DEFAULT_COHERENCE_TOLERANCE: f64 = 1e-9;
/// Default absolute tolerance for adaptive quadrature.
pub const QUADRATURE_TOLERANCE: f64 = 1e-10;

/// Evaluator shape of a transformation family.
#[derive(Debug, Clone)]
pub enum FamilyKind {
    /// `S_i(z) = clamp(nz − (i−1), 0, 1)` (1-based `i`).
    UniformSegments,
    /// `S_i(z) = Σ_{j=i}^{n} C(n,j)·z^j·(1−z)^{n−j}` (1-based `i`).
    BetaBernstein,
    /// `t(z) = U·s(z)` for a source family `s`.
    Mapped {
        source: Box<FamilyKind>,
        matrix: Vec<Vec<f64>>,
    },
}

/// A family of `n` transforms `S_i : [0, 1] → [0, 1]`.
#[derive(Debug, Clone)]
pub struct TransformFamily {
    n: usize,
    kind: FamilyKind,
}

/// Converts an exact rational to the nearest `f64`.
///
/// This is the single designated crossing from the exact side of the crate
/// into floating point; callers that need float weights (for coherence
/// checks) or float matrices (for [`apply_matrix`]) should funnel through it.
pub fn to_float(x: &Rational) -> f64 {
    x.to_f64().expect("rational entries are finite")
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    num_integer::binomial(n as u128, k as u128) as f64
}

impl TransformFamily {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    /// Evaluates the full vector `s(z) = (S_1(z), …, S_n(z))`.
    pub fn evaluate_all(&self, z: f64) -> Vec<f64> {
        eval_kind(&self.kind, self.n, z)
    }

    /// Evaluates `S_i(z)` for 0-based component `index`.
    pub fn evaluate(&self, index: usize, z: f64) -> f64 {
        assert!(index < self.n, "component {index} of a family of {}", self.n);
        self.evaluate_all(z)[index]
    }
}

fn eval_kind(kind: &FamilyKind, n: usize, z: f64) -> Vec<f64> {
    match kind {
        FamilyKind::UniformSegments => (0..n)
            .map(|idx| (n as f64 * z - idx as f64).clamp(0.0, 1.0))
            .collect(),
        FamilyKind::BetaBernstein => {
            // Terms of the binomial expansion of (z + (1−z))^n; all are
            // nonnegative, so the suffix sums are cancellation-free.
            let terms: Vec<f64> = (0..=n).map(|j| bernstein(n, j, z)).collect();
            let mut suffix = vec![0.0; n + 2];
            for j in (0..=n).rev() {
                suffix[j] = suffix[j + 1] + terms[j];
            }
            (0..n).map(|idx| suffix[idx + 1].min(1.0)).collect()
        }
        FamilyKind::Mapped { source, matrix } => {
            let s = eval_kind(source, n, z);
            matrix
                .iter()
                .map(|row| row.iter().zip(&s).map(|(u, si)| u * si).sum())
                .collect()
        }
    }
}

/// Bernstein basis polynomial `b_j^n(z) = C(n,j)·z^j·(1−z)^{n−j}`.
fn bernstein(n: usize, j: usize, z: f64) -> f64 {
    binomial_f64(n, j) * z.powi(j as i32) * (1.0 - z).powi((n - j) as i32)
}

/// The uniform-segments family: `S_i` is the CDF of the uniform
/// distribution on `[(i−1)/n, i/n]`.
pub fn uniform_family(n: usize) -> Result<TransformFamily> {
    if n == 0 {
        return Err(Error::EmptyFamily);
    }
    Ok(TransformFamily {
        n,
        kind: FamilyKind::UniformSegments,
    })
}

/// The beta family: `S_i` is the CDF of Beta(i, n−i+1), evaluated via the
/// binomial tail.
pub fn beta_family(n: usize) -> Result<TransformFamily> {
    if n == 0 {
        return Err(Error::EmptyFamily);
    }
    Ok(TransformFamily {
        n,
        kind: FamilyKind::BetaBernstein,
    })
}

/// Maps a family through a matrix: `t(z) = U·s(z)`.
///
/// When the source family is coherent for weights `p` and `U` lies in the
/// candidate set with `Uᵀq = p`, the mapped family is coherent for `q`:
/// `qᵀt(z) = (Uᵀq)ᵀs(z) = pᵀs(z) = z`, each `t_i` is a convex combination
/// of nondecreasing transforms, and the endpoints are preserved by the
/// unit row sums.
pub fn apply_matrix(u: &StochasticMatrix, family: &TransformFamily) -> Result<TransformFamily> {
    if u.n() != family.n {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {0}×{0} but the family has {1} members",
            u.n(),
            family.n
        )));
    }
    // The one Rational→float boundary crossing in the crate.
    let matrix: Vec<Vec<f64>> = (0..u.n())
        .map(|i| u.row(i).iter().map(to_float).collect())
        .collect();
    Ok(TransformFamily {
        n: family.n,
        kind: FamilyKind::Mapped {
            source: Box::new(family.kind.clone()),
            matrix,
        },
    })
}

/// Outcome of a coherence check on a uniform `z` grid.
#[derive(Debug, Clone)]
pub struct CoherenceReport {
    /// `max_z |qᵀs(z) − z|` over the grid.
    pub max_residual: f64,
    /// `(component, grid index)` pairs where `S_i` decreases by more than
    /// the tolerance between consecutive grid points.
    pub monotonicity_violations: Vec<(usize, usize)>,
    /// `(component, description)` pairs for `S_i(0) ≠ 0` / `S_i(1) ≠ 1`
    /// beyond the tolerance.
    pub endpoint_violations: Vec<(usize, String)>,
    pub grid_size: usize,
    pub tolerance: f64,
    pub pass: bool,
}

/// Uniform grid of `points ≥ 2` values spanning `[0, 1]`.
pub fn unit_grid(points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::BadGrid(format!(
            "need at least 2 grid points, got {points}"
        )));
    }
    let last = (points - 1) as f64;
    Ok((0..points).map(|k| k as f64 / last).collect())
}

/// Checks coherence of `family` for `weights` on a `grid_size`-point grid
/// at [`DEFAULT_COHERENCE_TOLERANCE`].
pub fn check_coherence(
    family: &TransformFamily,
    weights: &[f64],
    grid_size: usize,
) -> Result<CoherenceReport> {
    check_coherence_with_tolerance(family, weights, grid_size, DEFAULT_COHERENCE_TOLERANCE)
}

/// Checks endpoint, monotonicity, and mixture conditions on a uniform
/// grid, with an explicit tolerance.
pub fn check_coherence_with_tolerance(
    family: &TransformFamily,
    weights: &[f64],
    grid_size: usize,
    tolerance: f64,
) -> Result<CoherenceReport> {
    let n = family.n();
    if weights.len() != n {
        return Err(Error::BadWeights(format!(
            "{} weights for a family of {n}",
            weights.len()
        )));
    }
    if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
        return Err(Error::BadWeights(
            "weights must be finite and strictly positive".into(),
        ));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::BadWeights(format!(
            "weights sum to {total:.17}, expected 1 within 1e-12"
        )));
    }
    let grid = unit_grid(grid_size)?;

    let values: Vec<Vec<f64>> = grid.iter().map(|&z| family.evaluate_all(z)).collect();
    let mut max_residual: f64 = 0.0;
    for (k, z) in grid.iter().enumerate() {
        let mixture: f64 = weights.iter().zip(&values[k]).map(|(w, s)| w * s).sum();
        max_residual = max_residual.max((mixture - z).abs());
    }

    let mut monotonicity_violations = Vec::new();
    for i in 0..n {
        for (k, pair) in values.windows(2).enumerate() {
            if pair[1][i] < pair[0][i] - tolerance {
                monotonicity_violations.push((i, k));
            }
        }
    }

    let mut endpoint_violations = Vec::new();
    let first = &values[0];
    let last = &values[grid_size - 1];
    for i in 0..n {
        if first[i].abs() > tolerance {
            endpoint_violations.push((i, format!("S(0) = {:.17}, expected 0", first[i])));
        }
        if (last[i] - 1.0).abs() > tolerance {
            endpoint_violations.push((i, format!("S(1) = {:.17}, expected 1", last[i])));
        }
    }

    let pass = max_residual <= tolerance
        && monotonicity_violations.is_empty()
        && endpoint_violations.is_empty();
    Ok(CoherenceReport {
        max_residual,
        monotonicity_violations,
        endpoint_violations,
        grid_size,
        tolerance,
        pass,
    })
}

/// `∫₀¹ |S_i − S_{i+1}| dz` for consecutive pairs: each `S_i` is itself a
/// CDF on `[0, 1]`, and the area between neighbours is their 1-Wasserstein
/// distance.
///
/// Uniform-segments families integrate exactly (the difference is
/// piecewise linear with breakpoints on the `k/n` lattice); other kinds
/// use adaptive Simpson quadrature at [`QUADRATURE_TOLERANCE`].
pub fn wasserstein_consecutive(family: &TransformFamily) -> Vec<f64> {
    let n = family.n();
    if n < 2 {
        return Vec::new();
    }
    (0..n - 1)
        .map(|i| match family.kind() {
            FamilyKind::UniformSegments => {
                let breakpoints: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
                piecewise_linear_abs_integral(
                    |z| family.evaluate(i, z) - family.evaluate(i + 1, z),
                    &breakpoints,
                )
            }
            _ => adaptive_simpson(
                &|z| (family.evaluate(i, z) - family.evaluate(i + 1, z)).abs(),
                0.0,
                1.0,
                QUADRATURE_TOLERANCE,
            ),
        })
        .collect()
}

/// Exact integral of `|d|` for a function that is linear between
/// consecutive breakpoints: trapezoid per segment, split at the root when
/// the sign changes inside a segment.
fn piecewise_linear_abs_integral(d: impl Fn(f64) -> f64, breakpoints: &[f64]) -> f64 {
    let mut total = 0.0;
    for w in breakpoints.windows(2) {
        let (l, r) = (w[0], w[1]);
        let (dl, dr) = (d(l), d(r));
        if dl * dr >= 0.0 {
            total += (dl + dr).abs() / 2.0 * (r - l);
        } else {
            let root = l + (r - l) * dl / (dl - dr);
            total += dl.abs() / 2.0 * (root - l) + dr.abs() / 2.0 * (r - root);
        }
    }
    total
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    rec(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), eps, 48)
}

/// A base CDF `F` with its pseudo-inverse, for composing `S_i ∘ F`.
#[derive(Debug, Clone)]
pub enum BaseCdf {
    StandardNormal,
    /// Sorted sample; right-continuous steps of `1/m` (ties merge jumps).
    Empirical { samples: Vec<f64> },
}

impl BaseCdf {
    pub fn standard_normal() -> Self {
        BaseCdf::StandardNormal
    }

    /// Builds an empirical CDF from a (not necessarily sorted) sample.
    pub fn empirical(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::BadSample("empirical sample is empty".into()));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::BadSample(
                "empirical sample contains a non-finite value".into(),
            ));
        }
        samples.sort_by(|a, b| a.partial_cmp(b).expect("finite values compare"));
        Ok(BaseCdf::Empirical { samples })
    }

    /// `F(x)`; the standard-normal evaluator is `erfc(−x/√2)/2`, accurate
    /// to well under 1e−12 absolutely.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            BaseCdf::StandardNormal => libm::erfc(-x / std::f64::consts::SQRT_2) / 2.0,
            BaseCdf::Empirical { samples } => {
                let below = samples.partition_point(|s| *s <= x);
                below as f64 / samples.len() as f64
            }
        }
    }

    /// Pseudo-inverse `F⁻¹(u) = inf{x : F(x) ≥ u}` for `u ∈ (0, 1)`
    /// (empirical CDFs also accept `u = 1`).
    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            BaseCdf::StandardNormal => {
                assert!(u > 0.0 && u < 1.0, "normal quantile needs u in (0,1)");
                let (mut lo, mut hi) = (-40.0_f64, 40.0_f64);
                // Bisection: ~170 halvings squeeze the bracket to f64 resolution.
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.cdf(mid) < u {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= 1e-13 {
                        break;
                    }
                }
                0.5 * (lo + hi)
            }
            BaseCdf::Empirical { samples } => {
                assert!(u > 0.0 && u <= 1.0, "empirical quantile needs u in (0,1]");
                let m = samples.len();
                let k = ((u * m as f64).ceil() as usize).clamp(1, m);
                samples[k - 1]
            }
        }
    }
}

/// A rectangular table of floats with named columns (plot payload).
#[derive(Debug, Clone, PartialEq)]
pub struct GridTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Synthesizes conditional CDFs on `x_grid`: one row per `x` with columns
/// `x, F(x), T_1(F(x)), …, T_n(F(x))`.
pub fn synthesize(
    family: &TransformFamily,
    base: &BaseCdf,
    x_grid: &[f64],
) -> Result<GridTable> {
    if x_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::UnsortedGrid);
    }
    let mut columns = vec!["x".to_string(), "F".to_string()];
    columns.extend((1..=family.n()).map(|i| format!("T_{i}")));
    let rows = x_grid
        .iter()
        .map(|&x| {
            let u = base.cdf(x);
            let mut row = vec![x, u];
            row.extend(family.evaluate_all(u));
            row
        })
        .collect();
    Ok(GridTable { columns, rows })
}
