//! Constructive linearly independent progressions of maximal rank in model
//! sets and in finite unions of translated model sets.

mod meyer;

use num_traits::{One, Signed};

pub use meyer::{
    aprank_bounds, aprank_bounds_for_sample, euclideanize, li_ap_in_meyer, rank_gap_example, ApRankBracket, Branch,
    Euclideanized, MeyerAp, MeyerExpr, Translate, UpperTag,
};

use crate::cps::{
    enumerate_model_set_with_budget, grid_covering_bound, CutProjectScheme, Interval, LatticePoint, Region, Window,
    DEFAULT_ENUMERATION_BUDGET,
};
use crate::error::{Error, Result};
use crate::exact::{max_li_subset, sqrt_upper, QuadScalar, RatVector, Rational};
use crate::progression::{ap_rank, model_set_member, region_member, verify_ap, ArithmeticProgression, CoordinateKind};
use crate::vdw::{find_mono_grid, CubeColoring, Grid};

/// Tunables shared by the constructions.
#[derive(Clone, Debug)]
pub struct Settings {
    /// Cap on integer candidates per enumeration.
    pub budget: u64,
    /// Sample spacing for covering-radius estimates.
    pub resolution: Rational,
    /// Largest progression length tried by iterative deepening.
    pub max_length: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Self { budget: DEFAULT_ENUMERATION_BUDGET, resolution: Rational::new(1.into(), 10.into()), max_length: 64 }
    }
}

// how many times a search radius may double before giving up
const MAX_DOUBLINGS: u32 = 24;

fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn dist_sq(a: &[QuadScalar], b: &[QuadScalar]) -> QuadScalar {
    a.iter().zip(b).map(|(x, y)| (x - y).square()).sum()
}

fn give_up(budget: u64) -> Error {
    Error::BudgetExceeded { budget, needed: budget.saturating_add(1) }
}

/// Open boxes `U`, `V` with `U + M·V ⊆ w` and `0` inside `V`: `V` has
/// half-width `width/(4M)` per axis and `U` is `w` shrunk by `width/4`.
pub fn shrink_window(w: &Window, multiplier: u64) -> Result<(Window, Window)> {
    if multiplier == 0 {
        return Err(Error::Precondition("shrink multiplier must be positive".into()));
    }
    let Window::Box(axes) = w else {
        return Err(Error::InvalidWindow("shrinking needs a box window".into()));
    };
    let m = rat(multiplier as i64);
    let mut u = Vec::with_capacity(axes.len());
    let mut v = Vec::with_capacity(axes.len());
    for iv in axes {
        let quarter = iv.width().scale(&Rational::new(1.into(), 4.into()));
        u.push(Interval::open(&iv.lo + &quarter, &iv.hi - &quarter));
        let h = quarter.scale(&m.recip());
        v.push(Interval::open(-&h, h));
    }
    let (u, v) = (Window::Box(u), Window::Box(v));
    assert!(minkowski_inside(&u, &v, multiplier, w), "shrunk windows escape the original");
    Ok((u, v))
}

/// Exact check that the open box `U + M·V` lies in the box `w`.
pub fn minkowski_inside(u: &Window, v: &Window, multiplier: u64, w: &Window) -> bool {
    let (Window::Box(u), Window::Box(v), Window::Box(w)) = (u, v, w) else {
        return false;
    };
    u.iter().zip(v).zip(w).all(|((a, b), c)| {
        let lo = &a.lo + &b.lo.scale_int(multiplier as i64);
        let hi = &a.hi + &b.hi.scale_int(multiplier as i64);
        // the sum is open, so touching a closed or open end is fine
        lo >= c.lo && hi <= c.hi && lo < hi
    })
}

/// Empirical `R'` with `Λ(u) + B_{R'}(0)` covering a sample box around the
/// origin: grid samples at `resolution`, nearest points from an enumeration
/// over twice the sample box, plus one grid step. The sample box doubles
/// until every sample has a point within the enumerated area.
pub fn covering_radius_certificate(cps: &CutProjectScheme, u: &Window, settings: &Settings) -> Result<Rational> {
    cps.require_valid()?;
    if !settings.resolution.is_positive() {
        return Err(Error::Precondition("resolution must be positive".into()));
    }
    let d = cps.phys_dim();
    let mut half = Rational::one();
    for _ in 0..MAX_DOUBLINGS {
        let sample = Region::Box(vec![(QuadScalar::from_rational(-&half), QuadScalar::from_rational(half.clone())); d]);
        let wide = &half * rat(2);
        let area = Region::Box(vec![(QuadScalar::from_rational(-&wide), QuadScalar::from_rational(wide.clone())); d]);
        let points = enumerate_model_set_with_budget(cps, u, &area, settings.budget)?;
        let phys: Vec<Vec<QuadScalar>> = points.into_iter().map(|p| p.physical).collect();
        if let (Some(bound), _) = grid_covering_bound(&phys, &sample, &settings.resolution)? {
            if bound <= half {
                return Ok(bound);
            }
        }
        half *= rat(2);
    }
    Err(give_up(settings.budget))
}

/// The first `d+m` independent points of `Λ(v) ∩ B_ρ(0)`, for `ρ = 1, 2, 4, …`,
/// in order of physical norm (larger coordinates first on ties).
pub fn independent_ratios(cps: &CutProjectScheme, v: &Window, settings: &Settings) -> Result<Vec<LatticePoint>> {
    cps.require_valid()?;
    let n = cps.rank();
    let origin = vec![QuadScalar::zero(); cps.phys_dim()];
    let mut rho = Rational::one();
    for _ in 0..MAX_DOUBLINGS {
        let region = Region::ball(origin.clone(), rho.clone())?;
        let mut pts = enumerate_model_set_with_budget(cps, v, &region, settings.budget)?;
        pts.sort_by_cached_key(|p| (dist_sq(&p.physical, &origin), std::cmp::Reverse(p.coords.clone())));
        let coords: Vec<RatVector> = pts.iter().map(LatticePoint::coords_rational).collect();
        let picked = max_li_subset(&coords)?;
        if picked.len() >= n {
            return Ok(picked[..n].iter().map(|&i| pts[i].clone()).collect());
        }
        rho *= rat(2);
    }
    Err(give_up(settings.budget))
}

/// A certified progression inside a model set.
#[derive(Clone, Debug)]
pub struct LiApConstruction {
    pub ap: ArithmeticProgression,
    /// Every point lies within `radius` of the requested centre.
    pub radius: Rational,
    pub covering_radius: Rational,
    pub shrunk: Window,
    pub ratio_window: Window,
}

fn norm_upper(v: &[QuadScalar]) -> Rational {
    let sq: QuadScalar = v.iter().map(QuadScalar::square).sum();
    sqrt_upper(&sq, 32)
}

fn lattice_vec(p: &LatticePoint) -> RatVector {
    p.coords_rational()
}

/// A linearly independent progression of rank `d+m` and length `N` inside
/// `Λ(w) ∩ B_R(y)`, verified exactly before it is returned.
pub fn li_ap_in_model_set(cps: &CutProjectScheme, w: &Window, length: u64, y: &[QuadScalar]) -> Result<LiApConstruction> {
    li_ap_in_model_set_with(cps, w, length, y, &Settings::default())
}

pub fn li_ap_in_model_set_with(
    cps: &CutProjectScheme,
    w: &Window,
    length: u64,
    y: &[QuadScalar],
    settings: &Settings,
) -> Result<LiApConstruction> {
    cps.require_valid()?;
    if w.dim() != cps.int_dim() {
        return Err(Error::DimensionMismatch { expected: cps.int_dim(), found: w.dim() });
    }
    if y.len() != cps.phys_dim() {
        return Err(Error::DimensionMismatch { expected: cps.phys_dim(), found: y.len() });
    }
    let n = cps.rank();
    let multiplier = length.checked_mul(n as u64).ok_or_else(|| give_up(settings.budget))?.max(1);
    let boxed = match w {
        Window::Box(_) => w.clone(),
        other => other.inscribed_box(),
    };
    let (u, v) = shrink_window(&boxed, multiplier)?;
    let ratios = independent_ratios(cps, &v, settings)?;
    let ratio_reach = rat(length as i64) * ratios.iter().map(|r| norm_upper(&r.physical)).sum::<Rational>();
    let mut covering = covering_radius_certificate(cps, &u, settings)?;
    let member = model_set_member(cps, w);

    for _ in 0..MAX_DOUBLINGS {
        let near = Region::ball(y.to_vec(), covering.clone())?;
        let candidates = enumerate_model_set_with_budget(cps, &u, &near, settings.budget)?;
        let base = candidates.into_iter().min_by_key(|p| (dist_sq(&p.physical, y), p.coords.clone()));
        if let Some(base) = base {
            let radius = &ratio_reach + &covering;
            let ap = ArithmeticProgression::new(
                lattice_vec(&base),
                ratios.iter().map(lattice_vec).collect(),
                length,
                CoordinateKind::Lattice,
            )?;
            let ball = Region::ball(y.to_vec(), radius.clone())?;
            let within = region_member(cps, &ball);
            if ap_rank(&ap) == n && verify_ap(&ap, &member, Some(&within)) {
                return Ok(LiApConstruction { ap, radius, covering_radius: covering, shrunk: u, ratio_window: v });
            }
        }
        covering *= rat(2);
    }
    Err(give_up(settings.budget))
}

/// A monochromatic linearly independent progression.
#[derive(Clone, Debug)]
pub struct MonoLiAp {
    pub ap: ArithmeticProgression,
    pub color: u32,
    /// The enclosing progression and the grid selected inside it.
    pub source: LiApConstruction,
    pub grid: Grid,
}

/// Iterative deepening over `N = k, 2k, 4k, …`: colours the coefficient
/// cube of the length-`N` progression and rebases a monochromatic grid of
/// depth `k`.
pub fn mono_li_ap(
    cps: &CutProjectScheme,
    w: &Window,
    depth: u64,
    coloring: impl Fn(&[i64]) -> Option<u32>,
    y: &[QuadScalar],
    settings: &Settings,
) -> Result<MonoLiAp> {
    let mut length = depth.max(1);
    loop {
        let source = li_ap_in_model_set_with(cps, w, length, y, settings)?;
        let ap = &source.ap;
        let mut colors = Vec::new();
        for c in ap.coefficients() {
            let z = ap.lattice_point(&c).ok_or_else(|| Error::Precondition("coordinates exceed i64".into()))?;
            colors.push(coloring(&z).ok_or_else(|| Error::Precondition("colouring undefined on a model-set point".into()))?);
        }
        let r = colors.iter().max().copied().unwrap_or(0) + 1;
        let cube = CubeColoring::new(length, ap.dimension(), r, colors)?;
        if let Some(grid) = find_mono_grid(&cube, depth) {
            let color = cube.color(&grid.offsets);
            let ratios = ap
                .ratios
                .iter()
                .zip(&grid.steps)
                .map(|(r, &k)| r.iter().map(|x| x * rat(k as i64)).collect())
                .collect();
            let mono = ArithmeticProgression::new(ap.point(&grid.offsets), ratios, depth, ap.kind)?;
            let member = model_set_member(cps, w);
            assert!(verify_ap(&mono, &member, None), "rebased progression left the model set");
            assert_eq!(ap_rank(&mono), cps.rank(), "rebased progression lost rank");
            assert!(
                mono.coefficients().all(|c| mono.lattice_point(&c).and_then(|z| coloring(&z)) == Some(color)),
                "rebased progression is not monochromatic"
            );
            return Ok(MonoLiAp { ap: mono, color, source, grid });
        }
        if length >= settings.max_length {
            return Err(Error::NoMonoGrid { depth, size: length, dim: ap.dimension() });
        }
        length = (length * 2).min(settings.max_length);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cps::{builtin, integer_lattice};
    use crate::exact::rat_vec_from_ints;

    fn q(s: &str) -> QuadScalar {
        s.parse().unwrap()
    }

    fn unit() -> Window {
        Window::closed_box(&[(q("0"), q("1"))]).unwrap()
    }

    #[test]
    fn shrink_examples() {
        let (u, v) = shrink_window(&unit(), 1).unwrap();
        assert_eq!(u, Window::Box(vec![Interval::open(q("1/4"), q("3/4"))]));
        assert_eq!(v, Window::Box(vec![Interval::open(q("-1/4"), q("1/4"))]));
        let (u, v) = shrink_window(&unit(), 2).unwrap();
        assert_eq!(u, Window::Box(vec![Interval::open(q("1/4"), q("3/4"))]));
        assert_eq!(v, Window::Box(vec![Interval::open(q("-1/8"), q("1/8"))]));
        let rect = Window::closed_box(&[(q("0"), q("2")), (q("0"), q("1"))]).unwrap();
        let (u, v) = shrink_window(&rect, 1).unwrap();
        assert_eq!(u, Window::Box(vec![Interval::open(q("1/2"), q("3/2")), Interval::open(q("1/4"), q("3/4"))]));
        assert_eq!(v, Window::Box(vec![Interval::open(q("-1/2"), q("1/2")), Interval::open(q("-1/4"), q("1/4"))]));
        let ball = Window::ball(vec![q("0")], rat(1)).unwrap();
        assert!(matches!(shrink_window(&ball, 1), Err(Error::InvalidWindow(_))));
    }

    #[test]
    fn covering_radius_examples() {
        let s = Settings::default();
        let fib = builtin("fibonacci").unwrap();
        let u = Window::Box(vec![Interval::open(q("1/4"), q("3/4"))]);
        let r = covering_radius_certificate(&fib, &u, &s).unwrap();
        assert!(r <= rat(10) && r.is_positive());
        let r = covering_radius_certificate(&integer_lattice(1), &Window::trivial(), &s).unwrap();
        assert_eq!(r, Rational::new(1.into(), 2.into()) + &s.resolution);
        let thin = Window::Box(vec![Interval::open(q("0"), q("1/1000000000000"))]);
        let tiny = Settings { budget: 10_000, ..Settings::default() };
        assert!(matches!(covering_radius_certificate(&fib, &thin, &tiny), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn independent_ratio_examples() {
        let s = Settings::default();
        let fib = builtin("fibonacci").unwrap();
        let v = Window::Box(vec![Interval::open(q("-1/8"), q("1/8"))]);
        let r = independent_ratios(&fib, &v, &s).unwrap();
        assert_eq!(r.iter().map(|p| p.coords.clone()).collect::<Vec<_>>(), vec![vec![3, 5], vec![5, 8]]);
        let r = independent_ratios(&integer_lattice(2), &Window::trivial(), &s).unwrap();
        assert_eq!(r.iter().map(|p| p.coords.clone()).collect::<Vec<_>>(), vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn model_set_progressions() {
        let fib = builtin("fibonacci").unwrap();
        let c = li_ap_in_model_set(&fib, &unit(), 1, &[q("0")]).unwrap();
        assert_eq!(ap_rank(&c.ap), 2);
        assert_eq!(c.ap.ratios, vec![rat_vec_from_ints(&[3, 5]), rat_vec_from_ints(&[5, 8])]);
        let c0 = li_ap_in_model_set(&fib, &unit(), 0, &[q("5")]).unwrap();
        assert!(unit().contains(&fib.internal_of_rational(&c0.ap.base)));

        let z2 = integer_lattice(2);
        let c = li_ap_in_model_set(&z2, &Window::trivial(), 3, &[q("7/2"), q("-4")]).unwrap();
        assert_eq!(c.ap.ratios, vec![rat_vec_from_ints(&[1, 0]), rat_vec_from_ints(&[0, 1])]);
    }

    #[test]
    fn ball_windows_are_inscribed() {
        let fib = builtin("fibonacci").unwrap();
        let ball = Window::ball(vec![q("1/2")], Rational::new(1.into(), 4.into())).unwrap();
        let c = li_ap_in_model_set(&fib, &ball, 2, &[q("0")]).unwrap();
        assert!(verify_ap(&c.ap, model_set_member(&fib, &ball), None));
    }

    #[test]
    fn mono_examples() {
        let fib = builtin("fibonacci").unwrap();
        let s = Settings::default();
        let m = mono_li_ap(&fib, &unit(), 2, |_| Some(0), &[q("0")], &s).unwrap();
        assert_eq!(m.grid.steps, vec![1, 1]);
        let parity = |z: &[i64]| Some(z[0].rem_euclid(2) as u32);
        let m = mono_li_ap(&fib, &unit(), 1, parity, &[q("0")], &s).unwrap();
        assert_eq!(ap_rank(&m.ap), 2);
        let partial = |_: &[i64]| None;
        assert!(matches!(mono_li_ap(&fib, &unit(), 1, partial, &[q("0")], &s), Err(Error::Precondition(_))));
    }
}
