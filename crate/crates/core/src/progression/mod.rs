//! Higher-dimensional arithmetic progressions
//! `{ s + Σ c_i r_i : 0 ≤ c_i ≤ N }` over module coordinates.

mod search;

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub use search::brute_force_li_ap;

use crate::cps::{CutProjectScheme, Region, Window};
use crate::error::{Error, Result};
use crate::exact::{is_integral, rank_over_q, RatVector, Rational};

/// Default cap on `(N+1)^n` expansions.
pub const DEFAULT_POINT_BUDGET: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordinateKind {
    /// Integer coordinates in the generator basis of a scheme's lattice.
    Lattice,
    /// Rational coordinates in a module basis (lattice generators plus any
    /// symbolic independent directions).
    Module,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArithmeticProgression {
    pub base: RatVector,
    pub ratios: Vec<RatVector>,
    pub length: u64,
    pub kind: CoordinateKind,
}

impl ArithmeticProgression {
    pub fn new(base: RatVector, ratios: Vec<RatVector>, length: u64, kind: CoordinateKind) -> Result<Self> {
        if ratios.is_empty() {
            return Err(Error::Precondition("a progression needs at least one ratio".into()));
        }
        for r in &ratios {
            if r.len() != base.len() {
                return Err(Error::DimensionMismatch { expected: base.len(), found: r.len() });
            }
        }
        if kind == CoordinateKind::Lattice && !(is_integral(&base) && ratios.iter().all(|r| is_integral(r))) {
            return Err(Error::Precondition("lattice progressions need integer coordinates".into()));
        }
        Ok(Self { base, ratios, length, kind })
    }

    pub fn from_lattice(base: &[i64], ratios: &[Vec<i64>], length: u64) -> Result<Self> {
        let conv = |v: &[i64]| v.iter().map(|&x| Rational::from_integer(x.into())).collect::<RatVector>();
        Self::new(conv(base), ratios.iter().map(|r| conv(r)).collect(), length, CoordinateKind::Lattice)
    }

    /// Number of ratios `n`.
    pub fn dimension(&self) -> usize {
        self.ratios.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.len()
    }

    /// `(N+1)^n`, or `None` on overflow.
    pub fn point_count(&self) -> Option<u64> {
        (self.length.checked_add(1)?).checked_pow(self.dimension() as u32)
    }

    pub fn point(&self, coeffs: &[u64]) -> RatVector {
        let mut p = self.base.clone();
        for (c, r) in coeffs.iter().zip(&self.ratios) {
            if *c == 0 {
                continue;
            }
            let c = Rational::from_integer((*c).into());
            for (x, y) in p.iter_mut().zip(r) {
                *x += &c * y;
            }
        }
        p
    }

    /// Coefficient tuples in lexicographic order.
    pub fn coefficients(&self) -> CoefficientCube {
        CoefficientCube::new(self.dimension(), self.length)
    }

    fn check_budget(&self, budget: u64) -> Result<u64> {
        match self.point_count() {
            Some(n) if n <= budget => Ok(n),
            n => Err(Error::BudgetExceeded { budget, needed: n.unwrap_or(u64::MAX) }),
        }
    }

    /// Integer coordinates of a lattice-kind progression's point.
    pub fn lattice_point(&self, coeffs: &[u64]) -> Option<Vec<i64>> {
        self.point(coeffs).iter().map(|x| x.is_integer().then(|| x.to_integer().to_i64()).flatten()).collect()
    }

    /// The sub-progression using the first `k` ratios.
    pub fn truncated(&self, k: usize) -> Self {
        Self { ratios: self.ratios[..k.min(self.ratios.len())].to_vec(), ..self.clone() }
    }
}

/// Iterator over `{0..=N}^n` in lexicographic order.
#[derive(Clone, Debug)]
pub struct CoefficientCube {
    current: Option<Vec<u64>>,
    max: u64,
}

impl CoefficientCube {
    pub fn new(dim: usize, max: u64) -> Self {
        Self { current: Some(vec![0; dim]), max }
    }
}

impl Iterator for CoefficientCube {
    type Item = Vec<u64>;
    fn next(&mut self) -> Option<Vec<u64>> {
        let out = self.current.clone()?;
        let cur = self.current.as_mut().expect("checked above");
        let mut k = cur.len();
        loop {
            if k == 0 {
                self.current = None;
                break;
            }
            k -= 1;
            if cur[k] < self.max {
                cur[k] += 1;
                break;
            }
            cur[k] = 0;
        }
        Some(out)
    }
}

pub fn ap_points(ap: &ArithmeticProgression, budget: u64) -> Result<Vec<RatVector>> {
    ap.check_budget(budget)?;
    Ok(ap.coefficients().map(|c| ap.point(&c)).collect())
}

pub fn is_proper(ap: &ArithmeticProgression, budget: u64) -> Result<bool> {
    let n = ap.check_budget(budget)?;
    let mut seen = HashSet::with_capacity(n as usize);
    Ok(ap.coefficients().all(|c| seen.insert(ap.point(&c))))
}

/// Rank of the module generated by the ratios.
pub fn ap_rank(ap: &ArithmeticProgression) -> usize {
    rank_over_q(&ap.ratios).expect("ratios share the base dimension")
}

pub fn is_li(ap: &ArithmeticProgression) -> bool {
    ap_rank(ap) == ap.dimension()
}

/// Minimal CRT multipliers for the embedding of an `n`-dimensional
/// progression of length `N` into a line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrtCoefficients {
    pub n: usize,
    pub length: u64,
    /// The `n` smallest primes exceeding `N`.
    pub primes: Vec<u64>,
    /// `m_i ≡ 1 (mod p_i)`, `m_i ≡ 0 (mod p_j)` for `j ≠ i`, minimal positive.
    pub values: Vec<BigInt>,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|k| k * k <= p).all(|k| !p.is_multiple_of(k))
}

pub fn crt_coefficients(n: usize, length: u64) -> Result<CrtCoefficients> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let primes: Vec<u64> = (length + 1..).filter(|&p| is_prime(p)).take(n).collect();
    let values = (0..n)
        .map(|i| {
            let others: BigInt = primes.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &p)| BigInt::from(p)).product();
            let p = BigInt::from(primes[i]);
            // others · (others⁻¹ mod p_i) is the least positive solution modulo Π p_j
            let inv = mod_inverse(&others, &p).expect("distinct primes are coprime");
            others * inv
        })
        .collect();
    Ok(CrtCoefficients { n, length, primes, values })
}

fn mod_inverse(a: &BigInt, p: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(p);
    if !e.gcd.is_one() {
        return None;
    }
    let inv = e.x.mod_floor(p);
    Some(if inv.is_zero() { p.clone() } else { inv })
}

/// The `n`-dimensional progression `s + Σ c_j m_j r` (length `N`) carved
/// out of the one-dimensional progression `line = (s, r, N')`. It is proper
/// and of rank one.
pub fn embed_rank1(line: &ArithmeticProgression, n: usize, length: u64) -> Result<ArithmeticProgression> {
    if line.dimension() != 1 {
        return Err(Error::Precondition("embed_rank1 expects a one-dimensional progression".into()));
    }
    let crt = crt_coefficients(n, length)?;
    let needed: BigInt = crt.values.iter().sum::<BigInt>() * BigInt::from(length);
    if BigInt::from(line.length) < needed {
        return Err(Error::Precondition(format!("line length {} is below the required {needed}", line.length)));
    }
    let ratios = crt
        .values
        .iter()
        .map(|m| {
            let m = Rational::from_integer(m.clone());
            line.ratios[0].iter().map(|x| x * &m).collect()
        })
        .collect();
    ArithmeticProgression::new(line.base.clone(), ratios, length, line.kind)
}

/// Every point satisfies `member` and, when given, `within`.
pub fn verify_ap(
    ap: &ArithmeticProgression,
    member: impl Fn(&RatVector) -> bool,
    within: Option<&dyn Fn(&RatVector) -> bool>,
) -> bool {
    ap.coefficients().all(|c| {
        let p = ap.point(&c);
        member(&p) && within.is_none_or(|w| w(&p))
    })
}

/// Exact model-set membership of a lattice-coordinate point.
pub fn model_set_member<'a>(cps: &'a CutProjectScheme, window: &'a Window) -> impl Fn(&RatVector) -> bool + 'a {
    move |p: &RatVector| {
        if p.len() != cps.rank() || !is_integral(p) {
            return false;
        }
        window.contains(&cps.internal_of_rational(p))
    }
}

/// Exact membership of a point's physical image in a region.
pub fn region_member<'a>(cps: &'a CutProjectScheme, region: &'a Region) -> impl Fn(&RatVector) -> bool + 'a {
    move |p: &RatVector| region.contains(&cps.physical_of_rational(&p[..cps.rank()]))
}

/// Verifies a lattice progression against `Λ(window)` and optionally a region.
pub fn verify_ap_in_model_set(
    cps: &CutProjectScheme,
    ap: &ArithmeticProgression,
    window: &Window,
    region: Option<&Region>,
) -> bool {
    let member = model_set_member(cps, window);
    match region {
        Some(r) => {
            let within = region_member(cps, r);
            verify_ap(ap, member, Some(&within))
        }
        None => verify_ap(ap, member, None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cps::builtin;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn line(values: &[i64]) -> Vec<RatVector> {
        values.iter().map(|&v| vec![Rational::from_integer(v.into())]).collect()
    }

    #[test]
    fn crt_examples() {
        let c = crt_coefficients(1, 5).unwrap();
        assert_eq!((c.primes, c.values), (vec![7], ints(&[1])));
        let c = crt_coefficients(2, 2).unwrap();
        assert_eq!((c.primes, c.values), (vec![3, 5], ints(&[10, 6])));
        let c = crt_coefficients(3, 1).unwrap();
        assert_eq!((c.primes, c.values), (vec![2, 3, 5], ints(&[15, 10, 6])));
        assert!(crt_coefficients(0, 3).is_err());
    }

    #[test]
    fn ap_points_examples() {
        let ap = ArithmeticProgression::from_lattice(&[0], &[vec![1]], 2).unwrap();
        assert_eq!(ap_points(&ap, 100).unwrap(), line(&[0, 1, 2]));
        let ap = ArithmeticProgression::from_lattice(&[0], &[vec![10], vec![6]], 1).unwrap();
        assert_eq!(ap_points(&ap, 100).unwrap(), line(&[0, 6, 10, 16]));
        let ap = ArithmeticProgression::from_lattice(&[4], &[vec![10], vec![6]], 0).unwrap();
        assert_eq!(ap_points(&ap, 100).unwrap(), line(&[4]));
        let big = ArithmeticProgression::from_lattice(&[0], &vec![vec![1]; 7], 9).unwrap();
        assert!(matches!(ap_points(&big, 1000), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn properness_examples() {
        let ap = ArithmeticProgression::from_lattice(&[0], &[vec![10], vec![6]], 2).unwrap();
        assert!(is_proper(&ap, 100).unwrap());
        let ap = ArithmeticProgression::from_lattice(&[0], &[vec![1], vec![1]], 1).unwrap();
        assert!(!is_proper(&ap, 100).unwrap());
        let ap = ArithmeticProgression::from_lattice(&[0, 0], &[vec![3, 5], vec![5, 8]], 4).unwrap();
        assert!(is_proper(&ap, 100).unwrap());
    }

    #[test]
    fn rank_examples() {
        let ap = ArithmeticProgression::from_lattice(&[0], &[vec![10], vec![6]], 2).unwrap();
        assert_eq!(ap_rank(&ap), 1);
        let ap = ArithmeticProgression::from_lattice(&[0, 0], &[vec![3, 5], vec![5, 8]], 2).unwrap();
        assert_eq!(ap_rank(&ap), 2);
        assert!(is_li(&ap));
        let ap = ArithmeticProgression::from_lattice(&[0, 0], &[vec![0, 7]], 2).unwrap();
        assert_eq!(ap_rank(&ap), 1);
    }

    #[test]
    fn embed_examples() {
        let l = ArithmeticProgression::from_lattice(&[0], &[vec![1]], 32).unwrap();
        let ap = embed_rank1(&l, 2, 2).unwrap();
        assert_eq!(ap.ratios, line(&[10, 6]));
        let pts = ap_points(&ap, 100).unwrap();
        assert_eq!(pts.len(), 9);
        assert!(pts.iter().all(|p| p[0] >= Rational::zero() && p[0] <= Rational::from_integer(32.into())));
        assert!(is_proper(&ap, 100).unwrap());
        assert_eq!(ap_rank(&ap), 1);

        let l = ArithmeticProgression::from_lattice(&[3, 1], &[vec![2, 5]], 4).unwrap();
        assert_eq!(embed_rank1(&l, 1, 4).unwrap(), l);

        let short = ArithmeticProgression::from_lattice(&[0], &[vec![1]], 31).unwrap();
        assert!(matches!(embed_rank1(&short, 2, 2), Err(Error::Precondition(_))));
    }

    #[test]
    fn verify_examples() {
        let cps = builtin("fibonacci").unwrap();
        let q = |s: &str| s.parse::<crate::exact::QuadScalar>().unwrap();
        let w = Window::closed_box(&[(q("0"), q("1"))]).unwrap();
        let ap = ArithmeticProgression::from_lattice(&[1, 1], &[vec![3, 5], vec![5, 8]], 1).unwrap();
        assert!(verify_ap_in_model_set(&cps, &ap, &w, None));
        let shrunk = Window::closed_box(&[(q("0"), q("1/3"))]).unwrap();
        assert!(!verify_ap_in_model_set(&cps, &ap, &shrunk, None));
        let single = ArithmeticProgression::from_lattice(&[1, 1], &[vec![3, 5]], 0).unwrap();
        assert!(verify_ap_in_model_set(&cps, &single, &shrunk, None) == shrunk.contains(&cps.star(&[1, 1]).internal));
        let tight = Region::centered(1, 3);
        assert!(!verify_ap_in_model_set(&cps, &ap, &w, Some(&tight)));
    }
}
