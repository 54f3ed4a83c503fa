//! Dense square matrices over [`Rational`] and their elementary algebra.
//!
//! Two carriers: [`GeneralMatrix`] (no sign or row-sum constraints; houses
//! duals, witness directions, and intermediate products) and
//! [`StochasticMatrix`] (entrywise nonnegative with unit row sums).
//! Matrices are dense and immutable values; problem sizes are small.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::{format_rational, Rational};
use crate::vector::StochasticVector;
use crate::{Error, Result};

/// A dense `n×n` matrix of exact rationals, row-major, `n ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralMatrix {
    n: usize,
    entries: Vec<Rational>,
}

impl GeneralMatrix {
    /// Builds a matrix from rows; every row must have length `rows.len()`.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::DimensionMismatch("matrix must be at least 1x1".into()));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            entries.extend(row);
        }
        Ok(GeneralMatrix { n, entries })
    }

    /// The `n×n` zero matrix. Panics if `n == 0`.
    pub fn zero(n: usize) -> Self {
        assert!(n > 0, "matrix must be at least 1x1");
        GeneralMatrix {
            n,
            entries: vec![Rational::zero(); n * n],
        }
    }

    /// The `n×n` identity. Panics if `n == 0`.
    pub fn identity(n: usize) -> Self {
        let mut m = GeneralMatrix::zero(n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.entries[i * self.n + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Rational]> {
        self.entries.chunks(self.n)
    }

    pub fn transpose(&self) -> GeneralMatrix {
        let n = self.n;
        let mut t = GeneralMatrix::zero(n);
        for i in 0..n {
            for j in 0..n {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// Matrix-vector product `A·v`.
    pub fn mat_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {0}x{0} but vector has {1} entries",
                self.n,
                v.len()
            )));
        }
        Ok((0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }
}

impl std::fmt::Display for GeneralMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(format_rational).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// An entrywise nonnegative square matrix with unit row sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StochasticMatrix {
    inner: GeneralMatrix,
}

impl StochasticMatrix {
    /// Validates a general matrix as (right) stochastic.
    pub fn new(m: GeneralMatrix) -> Result<Self> {
        for i in 0..m.n() {
            let mut sum = Rational::zero();
            for j in 0..m.n() {
                let v = m.get(i, j);
                if v.is_negative() {
                    return Err(Error::NegativeEntry {
                        row: i,
                        col: j,
                        value: format_rational(v),
                    });
                }
                sum += v;
            }
            if !sum.is_one() {
                return Err(Error::RowSumNotOne {
                    row: i,
                    sum: format_rational(&sum),
                });
            }
        }
        Ok(StochasticMatrix { inner: m })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        StochasticMatrix::new(GeneralMatrix::from_rows(rows)?)
    }

    pub fn identity(n: usize) -> Self {
        StochasticMatrix {
            inner: GeneralMatrix::identity(n),
        }
    }

    pub fn n(&self) -> usize {
        self.inner.n()
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        self.inner.get(i, j)
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        self.inner.row(i)
    }

    pub fn as_general(&self) -> &GeneralMatrix {
        &self.inner
    }

    pub fn into_general(self) -> GeneralMatrix {
        self.inner
    }
}

/// Exact product `A·B`.
pub fn mat_mul(a: &GeneralMatrix, b: &GeneralMatrix) -> Result<GeneralMatrix> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch(format!(
            "cannot multiply {0}x{0} by {1}x{1}",
            a.n(),
            b.n()
        )));
    }
    let n = a.n();
    let mut c = GeneralMatrix::zero(n);
    for i in 0..n {
        for k in 0..n {
            let aik = a.get(i, k);
            if aik.is_zero() {
                continue;
            }
            for j in 0..n {
                let bkj = b.get(k, j);
                if !bkj.is_zero() {
                    let cur = c.get(i, j) + aik * bkj;
                    c.set(i, j, cur);
                }
            }
        }
    }
    Ok(c)
}

/// Exact determinant via fraction-free (Bareiss) elimination.
///
/// Rows are first scaled to integers by their denominator lcm; the integer
/// Bareiss recurrence then divides exactly at every step, avoiding the
/// coefficient blow-up of naive fraction elimination. Singular matrices
/// return 0.
pub fn determinant(a: &GeneralMatrix) -> Rational {
    let n = a.n();
    // Integer row scaling: det(A) = det(scaled) / prod(row lcms).
    let mut scale = BigInt::one();
    let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for row in a.rows() {
        let l = row
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        scale *= &l;
        m.push(row.iter().map(|x| x.numer() * (&l / x.denom())).collect());
    }

    let mut sign = 1i8;
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return Rational::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                m[i][j] = t / &prev; // exact by the Bareiss identity
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let mut det = m[n - 1][n - 1].clone();
    if sign < 0 {
        det = -det;
    }
    Rational::new(det, scale)
}

/// Exact trace (sum of diagonal entries).
pub fn trace(a: &GeneralMatrix) -> Rational {
    (0..a.n()).map(|i| a.get(i, i).clone()).sum()
}

/// Cofactor-expansion determinant; exponential, test oracle only.
#[cfg(test)]
fn determinant_by_cofactors(a: &GeneralMatrix) -> Rational {
    fn go(get: &dyn Fn(usize, usize) -> Rational, rows: &[usize], cols: &[usize]) -> Rational {
        if rows.len() == 1 {
            return get(rows[0], cols[0]);
        }
        let mut acc = Rational::zero();
        let mut sign = Rational::one();
        for &c in cols {
            let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let minor = go(get, &rows[1..], &sub_cols);
            acc += &sign * get(rows[0], c) * minor;
            sign = -sign;
        }
        acc
    }
    let n = a.n();
    let rows: Vec<usize> = (0..n).collect();
    let cols: Vec<usize> = (0..n).collect();
    go(&|i, j| a.get(i, j).clone(), &rows, &cols)
}

/// `Uᵀq` for stochastic `U` and `q`: the induced image weight vector.
pub fn transpose_map(u: &StochasticMatrix, q: &StochasticVector) -> Result<Vec<Rational>> {
    if u.n() != q.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {0}x{0} but vector has {1} entries",
            u.n(),
            q.len()
        )));
    }
    let n = u.n();
    Ok((0..n)
        .map(|j| (0..n).map(|i| u.get(i, j) * q.get(i)).sum())
        .collect())
}
