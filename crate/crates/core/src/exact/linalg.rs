//! Exact linear algebra over Q and over Q(√D).
//!
//! Row reduction over Q is done fraction-free: every row is scaled to a
//! primitive integer vector, and elimination uses cross-multiplication
//! followed by content removal.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{QuadScalar, Rational};
use crate::error::{Error, Result};

pub type RatVector = Vec<Rational>;

pub fn rat_vec_from_ints(v: &[i64]) -> RatVector {
    v.iter().map(|&x| Rational::from_integer(x.into())).collect()
}

/// Scales a rational vector to a primitive integer vector with the same
/// direction (the first nonzero sign is kept).
fn primitive_row(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let row: Vec<BigInt> = v.iter().map(|x| (x * Rational::from_integer(lcm.clone())).to_integer()).collect();
    make_primitive(row)
}

fn make_primitive(mut row: Vec<BigInt>) -> Vec<BigInt> {
    let g = row.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in row.iter_mut() {
            *x /= &g;
        }
    }
    row
}

/// Echelon basis of a subspace of Q^n, grown one vector at a time.
#[derive(Debug, Clone)]
pub struct SpanBasis {
    dim: usize,
    rows: Vec<(usize, Vec<BigInt>)>,
}

impl SpanBasis {
    pub fn new(dim: usize) -> Self {
        Self { dim, rows: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &[Rational]) -> Result<Vec<BigInt>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        let mut row = primitive_row(v);
        for (pivot, basis_row) in &self.rows {
            if row[*pivot].is_zero() {
                continue;
            }
            let f = basis_row[*pivot].clone();
            let g = row[*pivot].clone();
            for (x, y) in row.iter_mut().zip(basis_row) {
                *x = &f * &*x - &g * y;
            }
            row = make_primitive(row);
        }
        Ok(row)
    }

    /// Adds `v` when it is independent of the current span; returns whether it was added.
    pub fn insert(&mut self, v: &[Rational]) -> Result<bool> {
        let row = self.reduce(v)?;
        match row.iter().position(|x| !x.is_zero()) {
            Some(pivot) => {
                self.rows.push((pivot, row));
                Ok(true)
            }
            None => Ok(false),
        }
    }

    pub fn contains(&self, v: &[Rational]) -> Result<bool> {
        Ok(self.reduce(v)?.iter().all(Zero::is_zero))
    }
}

fn common_dim(vectors: &[RatVector]) -> Result<usize> {
    let dim = vectors.first().map_or(0, Vec::len);
    for v in vectors {
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
        }
    }
    Ok(dim)
}

/// Indices of the first maximal linearly independent subset, scanning in input order.
pub fn max_li_subset(vectors: &[RatVector]) -> Result<Vec<usize>> {
    let mut basis = SpanBasis::new(common_dim(vectors)?);
    let mut picked = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        if basis.insert(v)? {
            picked.push(i);
        }
    }
    Ok(picked)
}

/// Dimension of the Q-span. For modules inside a real vector space this is
/// also the rank over Z.
pub fn rank_over_q(vectors: &[RatVector]) -> Result<usize> {
    Ok(max_li_subset(vectors)?.len())
}

/// Solves `Σ x_j · columns[j] = target` over Q.
///
/// The columns must be linearly independent (`RankDeficient` otherwise);
/// `Ok(None)` means the system is inconsistent.
pub fn solve_rational(columns: &[RatVector], target: &[Rational]) -> Result<Option<RatVector>> {
    let n = columns.len();
    let rows = target.len();
    for c in columns {
        if c.len() != rows {
            return Err(Error::DimensionMismatch { expected: rows, found: c.len() });
        }
    }
    // augmented integer matrix, one row per equation
    let mut m: Vec<Vec<BigInt>> = (0..rows)
        .map(|i| {
            let mut r: RatVector = columns.iter().map(|c| c[i].clone()).collect();
            r.push(target[i].clone());
            primitive_row(&r)
        })
        .collect();
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..n {
        let Some(p) = (pivot_row..rows).find(|&r| !m[r][col].is_zero()) else {
            return Err(Error::RankDeficient { rank: pivots.len(), cols: n });
        };
        m.swap(pivot_row, p);
        for r in 0..rows {
            if r == pivot_row || m[r][col].is_zero() {
                continue;
            }
            let f = m[pivot_row][col].clone();
            let g = m[r][col].clone();
            let pr = m[pivot_row].clone();
            for (x, y) in m[r].iter_mut().zip(&pr) {
                *x = &f * &*x - &g * y;
            }
            m[r] = make_primitive(std::mem::take(&mut m[r]));
        }
        pivots.push(col);
        pivot_row += 1;
    }
    if m[pivot_row..].iter().any(|r| !r[n].is_zero()) {
        return Ok(None);
    }
    Ok(Some(
        (0..n).map(|i| Rational::new(m[i][n].clone(), m[i][i].clone())).collect(),
    ))
}

/// Inverse of a square matrix over Q(√D), by Gauss–Jordan elimination.
pub fn quad_inverse(matrix: &[Vec<QuadScalar>]) -> Result<Vec<Vec<QuadScalar>>> {
    let n = matrix.len();
    let mut a: Vec<Vec<QuadScalar>> = matrix.to_vec();
    for row in &a {
        if row.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: row.len() });
        }
    }
    let mut inv: Vec<Vec<QuadScalar>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { QuadScalar::one() } else { QuadScalar::zero() }).collect())
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(Error::Singular)?;
        a.swap(col, p);
        inv.swap(col, p);
        let pivot_inv = a[col][col].recip().expect("nonzero pivot");
        for j in 0..n {
            a[col][j] = &a[col][j] * &pivot_inv;
            inv[col][j] = &inv[col][j] * &pivot_inv;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let t = &f * &a[col][j];
                a[r][j] -= &t;
                let t = &f * &inv[col][j];
                inv[r][j] -= &t;
            }
        }
    }
    Ok(inv)
}

/// Determinant over Q(√D).
pub fn quad_determinant(matrix: &[Vec<QuadScalar>]) -> Result<QuadScalar> {
    let n = matrix.len();
    let mut a: Vec<Vec<QuadScalar>> = matrix.to_vec();
    for row in &a {
        if row.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: row.len() });
        }
    }
    let mut det = QuadScalar::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Ok(QuadScalar::zero());
        };
        if p != col {
            a.swap(col, p);
            det = -det;
        }
        det = &det * &a[col][col];
        let pivot_inv = a[col][col].recip().expect("nonzero pivot");
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] * &pivot_inv;
            for j in col..n {
                let t = &f * &a[col][j];
                a[r][j] -= &t;
            }
        }
    }
    Ok(det)
}

/// Flattens quadratic coordinates to rationals, `(a, b)` per entry.
/// Since `1` and `√D` are independent over Q, Q-linear relations among
/// quadratic vectors are exactly the relations among their flattenings.
pub fn flatten_quad(v: &[QuadScalar]) -> RatVector {
    v.iter().flat_map(|x| [x.a().clone(), x.b().clone()]).collect()
}

pub fn is_integral(v: &[Rational]) -> bool {
    v.iter().all(|x| x.is_integer())
}

pub fn lcm_of_denominators(v: &[Rational]) -> BigInt {
    v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom())).abs()
}
