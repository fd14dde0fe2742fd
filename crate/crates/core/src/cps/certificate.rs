//! Finite-radius Delone and Meyer certificates for enumerated samples.
//!
//! These certify properties of a finite sample only. Nearest-neighbour
//! searches are screened in floating point and the surviving candidates are
//! re-evaluated exactly.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{LatticePoint, Region};
use crate::error::{Error, Result};
use crate::exact::{sqrt_upper, QuadScalar, Rational};

const SAMPLE_BUDGET: usize = 4_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeloneCertificate {
    /// Exact minimum squared distance between distinct sample points.
    pub min_gap_sq: QuadScalar,
    /// Largest gap between consecutive points (one-dimensional samples only).
    pub max_gap: Option<QuadScalar>,
    /// Upper bound on the distance from any grid sample of the region to
    /// the nearest point, rounded up to the grid and padded by one step.
    pub covering_radius_bound: Rational,
    pub resolution: Rational,
    pub grid_samples: usize,
}

fn approx(v: &[QuadScalar]) -> Vec<f64> {
    v.iter().map(QuadScalar::to_f64).collect()
}

fn dist_sq(a: &[QuadScalar], b: &[QuadScalar]) -> QuadScalar {
    a.iter().zip(b).map(|(x, y)| (x - y).square()).sum()
}

fn dist_sq_f64(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn near(candidate: f64, best: f64) -> bool {
    candidate <= best * (1.0 + 1e-6) + 1e-9
}

/// Exact minimum squared distance among pairwise distinct vectors.
fn min_pairwise_sq(vectors: &[Vec<QuadScalar>]) -> QuadScalar {
    if vectors.first().is_some_and(|v| v.len() == 1) {
        let mut xs: Vec<&QuadScalar> = vectors.iter().map(|v| &v[0]).collect();
        xs.sort();
        return xs
            .windows(2)
            .map(|w| (w[1] - w[0]).square())
            .min()
            .expect("at least two values");
    }
    let fl: Vec<Vec<f64>> = vectors.iter().map(|v| approx(v)).collect();
    let mut best = f64::INFINITY;
    for i in 0..fl.len() {
        for j in i + 1..fl.len() {
            best = best.min(dist_sq_f64(&fl[i], &fl[j]));
        }
    }
    let mut exact: Option<QuadScalar> = None;
    for i in 0..fl.len() {
        for j in i + 1..fl.len() {
            if near(dist_sq_f64(&fl[i], &fl[j]), best) {
                let d = dist_sq(&vectors[i], &vectors[j]);
                if exact.as_ref().is_none_or(|e: &QuadScalar| d < *e) {
                    exact = Some(d);
                }
            }
        }
    }
    exact.expect("at least two vectors")
}

/// Rational grid points of spacing `h` inside the region.
fn grid_samples(region: &Region, h: &Rational) -> Result<Vec<Vec<QuadScalar>>> {
    let axes: Vec<(BigInt, BigInt)> = region
        .bounding_box()
        .iter()
        .map(|(lo, hi)| {
            let inv = QuadScalar::from_rational(h.recip());
            ((lo * &inv).ceil(), (hi * &inv).floor())
        })
        .collect();
    let mut count: usize = 1;
    for (l, hgh) in &axes {
        let n: BigInt = hgh - l + 1u32;
        let n = n.max(BigInt::zero()).to_usize().unwrap_or(usize::MAX);
        count = count.saturating_mul(n);
    }
    if count > SAMPLE_BUDGET {
        return Err(Error::BudgetExceeded { budget: SAMPLE_BUDGET as u64, needed: count as u64 });
    }
    let mut out = Vec::new();
    let mut idx: Vec<BigInt> = axes.iter().map(|a| a.0.clone()).collect();
    if axes.iter().any(|(l, hgh)| l > hgh) {
        return Ok(out);
    }
    loop {
        let p: Vec<QuadScalar> = idx.iter().map(|k| QuadScalar::from_rational(h * Rational::from_integer(k.clone()))).collect();
        if region.contains(&p) {
            out.push(p);
        }
        let mut k = idx.len();
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            if idx[k] < axes[k].1 {
                idx[k] += 1;
                break;
            }
            idx[k] = axes[k].0.clone();
        }
    }
}

/// Exact maximum over `samples` of the squared distance to the nearest of `points`.
pub fn nearest_distance_sq_bound(points: &[Vec<QuadScalar>], samples: &[Vec<QuadScalar>]) -> Option<QuadScalar> {
    if points.is_empty() || samples.is_empty() {
        return None;
    }
    let pf: Vec<Vec<f64>> = points.iter().map(|p| approx(p)).collect();
    let nearest_f64: Vec<f64> = samples
        .iter()
        .map(|s| {
            let sf = approx(s);
            pf.iter().map(|p| dist_sq_f64(p, &sf)).fold(f64::INFINITY, f64::min)
        })
        .collect();
    let worst = nearest_f64.iter().cloned().fold(0.0, f64::max);
    let mut result: Option<QuadScalar> = None;
    for (s, &nf) in samples.iter().zip(&nearest_f64) {
        if nf < worst * (1.0 - 1e-6) - 1e-9 {
            continue;
        }
        let sf = approx(s);
        let exact = points
            .iter()
            .zip(&pf)
            .filter(|(_, p)| near(dist_sq_f64(p, &sf), nf))
            .map(|(p, _)| dist_sq(p, s))
            .min()
            .expect("screening keeps the nearest point");
        if result.as_ref().is_none_or(|r| exact > *r) {
            result = Some(exact);
        }
    }
    result
}

/// Smallest multiple `k·h` whose square is at least `sq`.
pub(crate) fn round_up_to_grid(sq: &QuadScalar, h: &Rational) -> Rational {
    let r = sqrt_upper(sq, 48);
    let mut k = (&r / h).ceil().to_integer();
    while k.is_positive() {
        let prev = h * Rational::from_integer(&k - 1);
        if (QuadScalar::from_rational(&prev * &prev) - sq).sign() >= 0 {
            k -= 1;
        } else {
            break;
        }
    }
    h * Rational::from_integer(k)
}

pub(crate) fn grid_covering_bound(
    points: &[Vec<QuadScalar>],
    region: &Region,
    resolution: &Rational,
) -> Result<(Option<Rational>, usize)> {
    let samples = grid_samples(region, resolution)?;
    let bound = nearest_distance_sq_bound(points, &samples).map(|sq| round_up_to_grid(&sq, resolution) + resolution);
    Ok((bound, samples.len()))
}

pub fn delone_certificate(points: &[LatticePoint], region: &Region, resolution: &Rational) -> Result<DeloneCertificate> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: points.len() });
    }
    if !resolution.is_positive() {
        return Err(Error::Precondition("grid resolution must be positive".into()));
    }
    let phys: Vec<Vec<QuadScalar>> = points.iter().map(|p| p.physical.clone()).collect();
    let min_gap_sq = min_pairwise_sq(&phys);
    let max_gap = (region.dim() == 1).then(|| {
        let mut xs: Vec<&QuadScalar> = phys.iter().map(|v| &v[0]).collect();
        xs.sort();
        xs.windows(2).map(|w| w[1] - w[0]).max().expect("two points")
    });
    let (bound, grid_samples) = grid_covering_bound(&phys, region, resolution)?;
    Ok(DeloneCertificate {
        min_gap_sq,
        max_gap,
        covering_radius_bound: bound.unwrap_or_else(Rational::zero),
        resolution: resolution.clone(),
        grid_samples,
    })
}

/// Exact minimum squared distance between distinct elements of the sampled
/// difference set `Λ − Λ`. A finite-radius certificate of uniform
/// discreteness of `Λ − Λ`, not a proof for the infinite set.
pub fn meyer_certificate(points: &[LatticePoint]) -> Result<QuadScalar> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: points.len() });
    }
    let mut diffs: BTreeMap<Vec<i64>, Vec<QuadScalar>> = BTreeMap::new();
    for p in points {
        for q in points {
            let key: Vec<i64> = p.coords.iter().zip(&q.coords).map(|(a, b)| a - b).collect();
            diffs.entry(key).or_insert_with(|| p.physical.iter().zip(&q.physical).map(|(a, b)| a - b).collect());
        }
    }
    let vectors: Vec<Vec<QuadScalar>> = diffs.into_values().collect();
    Ok(min_pairwise_sq(&vectors))
}
