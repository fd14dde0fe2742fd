//! Integer matrices: Hermite and Smith normal forms, and the multiplier `n`
//! with `n·M ⊆ N` for a full-rank submodule `N` of a free module `M`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Input("matrix dimensions must be positive".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: entries.len() });
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: r.len() });
            }
            entries.extend(r.iter().cloned().map(Into::into));
        }
        Self::new(rows.len(), cols, entries)
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![BigInt::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = BigInt::one();
        }
        Self { rows: n, cols: n, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }
}

/// `target -= k · source`, applied to whole rows.
fn row_axpy(rows: &mut [Vec<BigInt>], target: usize, source: usize, k: &BigInt) {
    if k.is_zero() {
        return;
    }
    let src = rows[source].clone();
    for (x, y) in rows[target].iter_mut().zip(&src) {
        *x -= k * y;
    }
}

/// Row-style Hermite normal form.
#[derive(Clone, Debug)]
pub struct Hermite {
    /// Nonzero rows of H, in echelon form with positive pivots and reduced entries above pivots.
    pub basis: Vec<Vec<BigInt>>,
    pub pivots: Vec<usize>,
    /// Unimodular U with U·A = H (all rows, including zero rows of H).
    pub transform: Vec<Vec<BigInt>>,
}

pub fn hermite_normal_form(m: &IntMatrix) -> Hermite {
    let mut h = m.to_rows();
    let mut u = IntMatrix::identity(m.rows).to_rows();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        loop {
            // smallest nonzero |entry| at or below r moves to row r
            let best = (r..m.rows).filter(|&i| !h[i][c].is_zero()).min_by_key(|&i| h[i][c].abs());
            let Some(best) = best else { break };
            h.swap(r, best);
            u.swap(r, best);
            let mut done = true;
            for i in r + 1..m.rows {
                if h[i][c].is_zero() {
                    continue;
                }
                let q = h[i][c].div_floor(&h[r][c]);
                row_axpy(&mut h, i, r, &q);
                row_axpy(&mut u, i, r, &q);
                if !h[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[r][c].is_zero() {
            continue;
        }
        if h[r][c].is_negative() {
            for x in h[r].iter_mut().chain(u[r].iter_mut()) {
                *x = -&*x;
            }
        }
        for i in 0..r {
            let q = h[i][c].div_floor(&h[r][c]);
            row_axpy(&mut h, i, r, &q);
            row_axpy(&mut u, i, r, &q);
        }
        pivots.push(c);
        r += 1;
    }
    h.truncate(r);
    Hermite { basis: h, pivots, transform: u }
}

/// Integer coefficients `x` with `Σ x_i · row_i(m) = target`, if any exist.
pub fn integer_combination(m: &IntMatrix, target: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    if target.len() != m.cols {
        return Err(Error::DimensionMismatch { expected: m.cols, found: target.len() });
    }
    let hnf = hermite_normal_form(m);
    let mut rest = target.to_vec();
    let mut coeffs_h = vec![BigInt::zero(); hnf.basis.len()];
    for (k, (&p, row)) in hnf.pivots.iter().zip(&hnf.basis).enumerate() {
        let (q, rem) = rest[p].div_rem(&row[p]);
        if !rem.is_zero() {
            return Ok(None);
        }
        for (x, y) in rest.iter_mut().zip(row) {
            *x -= &q * y;
        }
        coeffs_h[k] = q;
    }
    if rest.iter().any(|x| !x.is_zero()) {
        return Ok(None);
    }
    // target = c_H · H = c_H · U_top · A
    let coeffs = (0..m.rows)
        .map(|j| coeffs_h.iter().enumerate().map(|(k, c)| c * &hnf.transform[k][j]).sum())
        .collect();
    Ok(Some(coeffs))
}

/// Elementary divisors `d_1 | d_2 | … | d_r` of `m` (positive, `r` = rank).
pub fn smith_divisors(m: &IntMatrix) -> Vec<BigInt> {
    let mut a = m.to_rows();
    let (rows, cols) = (m.rows, m.cols);
    let mut divisors = Vec::new();
    for t in 0..rows.min(cols) {
        'pivot: loop {
            let best = (t..rows)
                .flat_map(|i| (t..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| !a[i][j].is_zero())
                .min_by_key(|&(i, j)| a[i][j].abs());
            let Some((bi, bj)) = best else {
                return divisors;
            };
            a.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
            let mut clean = true;
            for i in t + 1..rows {
                let q = a[i][t].div_floor(&a[t][t]);
                row_axpy(&mut a, i, t, &q);
                clean &= a[i][t].is_zero();
            }
            for j in t + 1..cols {
                let q = a[t][j].div_floor(&a[t][t]);
                for row in a.iter_mut() {
                    let s = &q * &row[t];
                    row[j] -= s;
                }
                clean &= a[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            for i in t + 1..rows {
                if (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&a[t][t])) {
                    // fold row i into row t and pivot again
                    let src = a[i].clone();
                    for (x, y) in a[t].iter_mut().zip(&src) {
                        *x += y;
                    }
                    continue 'pivot;
                }
            }
            break;
        }
        divisors.push(a[t][t].abs());
    }
    divisors
}

/// For a matrix whose rows generate a submodule `N` of `M = Z^cols`
/// (coordinates in a basis of `M`), the least `n` derived from the
/// elementary divisors with `n·M ⊆ N`, i.e. the largest divisor.
pub fn submodule_multiplier(gens_in_m_basis: &IntMatrix) -> Result<BigInt> {
    let divisors = smith_divisors(gens_in_m_basis);
    if divisors.len() < gens_in_m_basis.cols {
        return Err(Error::RankDeficient { rank: divisors.len(), cols: gens_in_m_basis.cols });
    }
    Ok(divisors.last().cloned().unwrap_or_else(BigInt::one))
}
