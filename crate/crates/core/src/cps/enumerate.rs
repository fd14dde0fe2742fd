//! Exhaustive enumeration of model-set points in a bounded region.
//!
//! Exhaustiveness comes from an exact integer bounding box: the product of
//! the region's and the window's bounding boxes is pulled back through the
//! exact inverse of the lattice matrix, and each coordinate range is rounded
//! outward with exact floor/ceil.

use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::{CutProjectScheme, LatticePoint, Region, Window};
use crate::error::{Error, Result};
use crate::exact::QuadScalar;

pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1_000_000;

/// Inclusive integer range per lattice coordinate that contains every
/// lattice point whose full coordinates lie in `bounds` (physical axes
/// first, then internal axes).
pub fn integer_search_box(cps: &CutProjectScheme, bounds: &[(QuadScalar, QuadScalar)]) -> Result<Vec<(i64, i64)>> {
    cps.require_valid()?;
    let inverse = cps.inverse().expect("valid scheme has an inverse");
    if bounds.len() != cps.rank() {
        return Err(Error::DimensionMismatch { expected: cps.rank(), found: bounds.len() });
    }
    let overflow = || Error::BudgetExceeded { budget: i64::MAX as u64, needed: u64::MAX };
    inverse
        .iter()
        .map(|row| {
            let mut lo = QuadScalar::zero();
            let mut hi = QuadScalar::zero();
            for (c, (bl, bh)) in row.iter().zip(bounds) {
                let (x, y) = (c * bl, c * bh);
                if x <= y {
                    lo += &x;
                    hi += &y;
                } else {
                    lo += &y;
                    hi += &x;
                }
            }
            let l = lo.ceil().to_i64().ok_or_else(overflow)?;
            let h = hi.floor().to_i64().ok_or_else(overflow)?;
            Ok((l, h))
        })
        .collect()
}

fn box_size(ranges: &[(i64, i64)]) -> u64 {
    ranges.iter().try_fold(1u64, |acc, &(l, h)| {
        if h < l {
            Some(0)
        } else {
            acc.checked_mul((h - l + 1) as u64)
        }
    })
    .unwrap_or(u64::MAX)
}

/// Every lattice point with physical part in `region` and internal part in
/// `window`, sorted lexicographically by integer coordinates.
pub fn enumerate_model_set(cps: &CutProjectScheme, window: &Window, region: &Region) -> Result<Vec<LatticePoint>> {
    enumerate_model_set_with_budget(cps, window, region, DEFAULT_ENUMERATION_BUDGET)
}

/// As [`enumerate_model_set`], refusing integer search boxes with more than
/// `budget` candidates.
pub fn enumerate_model_set_with_budget(
    cps: &CutProjectScheme,
    window: &Window,
    region: &Region,
    budget: u64,
) -> Result<Vec<LatticePoint>> {
    if window.dim() != cps.int_dim() {
        return Err(Error::DimensionMismatch { expected: cps.int_dim(), found: window.dim() });
    }
    if region.dim() != cps.phys_dim() {
        return Err(Error::DimensionMismatch { expected: cps.phys_dim(), found: region.dim() });
    }
    let mut bounds = region.bounding_box();
    bounds.extend(window.bounding_box());
    let ranges = integer_search_box(cps, &bounds)?;
    let size = box_size(&ranges);
    if size > budget {
        return Err(Error::BudgetExceeded { budget, needed: size });
    }
    if size == 0 {
        return Ok(Vec::new());
    }
    let (first_lo, first_hi) = ranges[0];
    let rest = &ranges[1..];
    let chunks: Vec<Vec<LatticePoint>> = (first_lo..=first_hi)
        .into_par_iter()
        .map(|z0| {
            let mut found = Vec::new();
            let mut z: Vec<i64> = std::iter::once(z0).chain(rest.iter().map(|r| r.0)).collect();
            loop {
                let internal = cps.internal_of(&z);
                if window.contains(&internal) {
                    let physical = cps.physical_of(&z);
                    if region.contains(&physical) {
                        found.push(LatticePoint { coords: z.clone(), physical, internal });
                    }
                }
                // odometer over coordinates 1..
                let mut k = z.len();
                loop {
                    if k == 1 {
                        return found;
                    }
                    k -= 1;
                    if z[k] < rest[k - 1].1 {
                        z[k] += 1;
                        break;
                    }
                    z[k] = rest[k - 1].0;
                }
            }
        })
        .collect();
    Ok(chunks.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cps::{builtin, integer_lattice};

    fn q(s: &str) -> QuadScalar {
        s.parse().unwrap()
    }

    #[test]
    fn fibonacci_small_region() {
        let cps = builtin("fibonacci").unwrap();
        let w = Window::closed_box(&[(q("0"), q("1"))]).unwrap();
        let pts = enumerate_model_set(&cps, &w, &Region::centered(1, 3)).unwrap();
        let mut values: Vec<QuadScalar> = pts.iter().map(|p| p.physical[0].clone()).collect();
        values.sort();
        // −φ has star −φ' ≈ 0.618, so it belongs next to 0, 1 and 1+φ
        assert_eq!(values, vec![q("-1/2-1/2*sqrt(5)"), q("0"), q("1"), q("3/2+1/2*sqrt(5)")]);
    }

    #[test]
    fn zero_radius_off_lattice_is_empty() {
        let cps = builtin("fibonacci").unwrap();
        let w = Window::closed_box(&[(q("0"), q("1"))]).unwrap();
        let region = Region::Ball { center: vec![q("1/3")], radius_sq: crate::exact::Rational::from_integer(0.into()) };
        assert!(enumerate_model_set(&cps, &w, &region).unwrap().is_empty());
    }

    #[test]
    fn integer_lattice_box() {
        let cps = integer_lattice(2);
        let region = Region::boxed(vec![(q("0"), q("2")), (q("-1/2"), q("1"))]).unwrap();
        let pts = enumerate_model_set(&cps, &Window::trivial(), &region).unwrap();
        assert_eq!(pts.len(), 6);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn budget_is_enforced() {
        let cps = integer_lattice(2);
        let err = enumerate_model_set_with_budget(&cps, &Window::trivial(), &Region::centered(2, 100), 10).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { budget: 10, .. }));
    }

    #[test]
    fn dimension_checks() {
        let cps = builtin("fibonacci").unwrap();
        assert!(enumerate_model_set(&cps, &Window::trivial(), &Region::centered(1, 3)).is_err());
    }
}
