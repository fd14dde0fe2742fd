//! Exhaustive search for linearly independent progressions in a finite set.

use std::collections::HashSet;

use num_traits::Zero;

use super::{ArithmeticProgression, CoefficientCube, CoordinateKind};
use crate::error::{Error, Result};
use crate::exact::{RatVector, Rational, SpanBasis};

struct Search<'a> {
    set: &'a HashSet<RatVector>,
    n: usize,
    length: u64,
    budget: u64,
    visited: u64,
}

impl Search<'_> {
    fn tick(&mut self) -> Result<()> {
        self.visited += 1;
        if self.visited > self.budget {
            return Err(Error::BudgetExceeded { budget: self.budget, needed: self.visited });
        }
        Ok(())
    }

    // Ratios are tried in increasing candidate index; each prefix must already
    // be an independent progression inside the set.
    fn extend(
        &mut self,
        base: &RatVector,
        candidates: &[RatVector],
        start: usize,
        chosen: &mut Vec<usize>,
        span: &SpanBasis,
    ) -> Result<bool> {
        if chosen.len() == self.n {
            return Ok(true);
        }
        for i in start..candidates.len() {
            self.tick()?;
            let r = &candidates[i];
            let mut next_span = span.clone();
            if !next_span.insert(r)? {
                continue;
            }
            chosen.push(i);
            if self.prefix_inside(base, candidates, chosen) && self.extend(base, candidates, i + 1, chosen, &next_span)? {
                return Ok(true);
            }
            chosen.pop();
        }
        Ok(false)
    }

    // Only points whose last chosen coefficient is nonzero are new.
    fn prefix_inside(&self, base: &RatVector, candidates: &[RatVector], chosen: &[usize]) -> bool {
        let k = chosen.len();
        CoefficientCube::new(k, self.length).filter(|c| c[k - 1] > 0).all(|c| {
            let mut p = base.clone();
            for (ci, &idx) in c.iter().zip(chosen) {
                let ci = Rational::from_integer((*ci).into());
                for (x, y) in p.iter_mut().zip(&candidates[idx]) {
                    *x += &ci * y;
                }
            }
            self.set.contains(&p)
        })
    }
}

/// First `n`-dimensional linearly independent progression of length `N`
/// contained in `points`, ordered by base (in sorted point order) and then by
/// the ratio index tuple. `budget` caps the number of search nodes.
pub fn brute_force_li_ap(
    points: &[RatVector],
    n: usize,
    length: u64,
    kind: CoordinateKind,
    budget: u64,
) -> Result<Option<ArithmeticProgression>> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let Some(dim) = points.first().map(Vec::len) else {
        return Ok(None);
    };
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
    }
    if n > dim {
        return Ok(None);
    }
    let mut sorted = points.to_vec();
    sorted.sort();
    sorted.dedup();

    if length == 0 {
        // a single point; any independent ratios will do
        let ratios = (0..n)
            .map(|i| (0..dim).map(|j| if i == j { Rational::from_integer(1.into()) } else { Rational::zero() }).collect())
            .collect();
        return ArithmeticProgression::new(sorted[0].clone(), ratios, 0, kind).map(Some);
    }

    let set: HashSet<RatVector> = sorted.iter().cloned().collect();
    let mut search = Search { set: &set, n, length, budget, visited: 0 };
    for base in &sorted {
        let candidates: Vec<RatVector> = sorted
            .iter()
            .filter(|p| *p != base)
            .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        let mut chosen = Vec::with_capacity(n);
        if search.extend(base, &candidates, 0, &mut chosen, &SpanBasis::new(dim))? {
            let ratios = chosen.iter().map(|&i| candidates[i].clone()).collect();
            return ArithmeticProgression::new(base.clone(), ratios, length, kind).map(Some);
        }
    }
    Ok(None)
}
