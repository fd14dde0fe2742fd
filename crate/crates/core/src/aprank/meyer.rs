//! Finite unions of translated model sets, their ap-rank, and conversion
//! back to a single model set when every translate is rational.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::{li_ap_in_model_set_with, LiApConstruction, Settings};
use crate::cps::{enumerate_model_set_with_budget, CutProjectScheme, Region, Window};
use crate::error::{Error, Result};
use crate::exact::{is_integral, lcm_of_denominators, rank_over_q, QuadScalar, RatVector, Rational};
use crate::progression::{ap_rank, brute_force_li_ap, verify_ap, ArithmeticProgression, CoordinateKind};

/// Radius of the physical ball used for sampled-module ranks and checks.
pub const SAMPLE_RADIUS: i64 = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Translate {
    /// A physical vector in the rational span of the physical generators.
    Rational(Vec<QuadScalar>),
    /// A translate independent of the lattice. Only the tag matters; the
    /// decimal embedding is for display.
    Symbolic { tag: String, approx: Vec<String> },
}

impl fmt::Display for Translate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Translate::Rational(t) => {
                let t: Vec<String> = t.iter().map(ToString::to_string).collect();
                write!(f, "({})", t.join(","))
            }
            Translate::Symbolic { tag, .. } => write!(f, "<{tag}>"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub translate: Translate,
    pub window: Window,
}

/// `Λ = ∪_j (Λ(W_j) + t_j)` over one scheme.
///
/// Points are written in module coordinates: rational coordinates against
/// the lattice generators, followed by one integer coordinate per distinct
/// symbolic tag.
#[derive(Clone, Debug)]
pub struct MeyerExpr {
    cps: CutProjectScheme,
    branches: Vec<Branch>,
    offsets: Vec<RatVector>,
    tags: Vec<String>,
}

impl MeyerExpr {
    pub fn new(cps: CutProjectScheme, branches: Vec<Branch>) -> Result<Self> {
        cps.require_valid()?;
        if branches.is_empty() {
            return Err(Error::Input("an expression needs at least one branch".into()));
        }
        let mut tags: Vec<String> = Vec::new();
        for b in &branches {
            if b.window.dim() != cps.int_dim() {
                return Err(Error::DimensionMismatch { expected: cps.int_dim(), found: b.window.dim() });
            }
            if let Translate::Symbolic { tag, .. } = &b.translate {
                if !tags.contains(tag) {
                    tags.push(tag.clone());
                }
            }
        }
        let width = cps.rank() + tags.len();
        let mut offsets = Vec::with_capacity(branches.len());
        for b in &branches {
            let mut off = vec![Rational::zero(); width];
            match &b.translate {
                Translate::Rational(t) => {
                    let z = cps
                        .rational_coords(t)?
                        .ok_or_else(|| Error::Input(format!("translate {} is outside the rational span", b.translate)))?;
                    off[..z.len()].clone_from_slice(&z);
                }
                Translate::Symbolic { tag, .. } => {
                    let k = tags.iter().position(|t| t == tag).expect("collected above");
                    off[cps.rank() + k] = Rational::one();
                }
            }
            offsets.push(off);
        }
        Ok(Self { cps, branches, offsets, tags })
    }

    /// The model set `Λ(w)` as a single untranslated branch.
    pub fn plain(cps: CutProjectScheme, w: Window) -> Result<Self> {
        let t = vec![QuadScalar::zero(); cps.phys_dim()];
        Self::new(cps, vec![Branch { translate: Translate::Rational(t), window: w }])
    }

    pub fn cps(&self) -> &CutProjectScheme {
        &self.cps
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    pub fn module_dim(&self) -> usize {
        self.cps.rank() + self.tags.len()
    }

    /// True when every translate is rational.
    pub fn is_euclidean(&self) -> bool {
        self.tags.is_empty()
    }

    /// Module coordinates of branch `j`'s translate.
    pub fn offset(&self, j: usize) -> &RatVector {
        &self.offsets[j]
    }

    fn in_branch(&self, j: usize, p: &[Rational]) -> bool {
        let n = self.cps.rank();
        let q: RatVector = p.iter().zip(&self.offsets[j]).map(|(a, b)| a - b).collect();
        q[n..].iter().all(Zero::is_zero)
            && is_integral(&q[..n])
            && self.branches[j].window.contains(&self.cps.internal_of_rational(&q[..n]))
    }

    /// Smallest branch index containing `p`.
    pub fn branch_of(&self, p: &[Rational]) -> Option<usize> {
        if p.len() != self.module_dim() {
            return None;
        }
        (0..self.branches.len()).find(|&j| self.in_branch(j, p))
    }

    pub fn contains(&self, p: &[Rational]) -> bool {
        self.branch_of(p).is_some()
    }

    /// Physical position, defined when no symbolic coordinate is set.
    pub fn physical(&self, p: &[Rational]) -> Option<Vec<QuadScalar>> {
        let n = self.cps.rank();
        p[n..].iter().all(Zero::is_zero).then(|| self.cps.physical_of_rational(&p[..n]))
    }

    /// Points of `Λ` whose physical position lies in `region`, sorted.
    /// Symbolic branches are sampled through their untranslated part.
    pub fn sample(&self, region: &Region, budget: u64) -> Result<Vec<RatVector>> {
        let n = self.cps.rank();
        let mut out = Vec::new();
        for (j, b) in self.branches.iter().enumerate() {
            let area = match &b.translate {
                Translate::Rational(t) => shift_region(region, t),
                Translate::Symbolic { .. } => region.clone(),
            };
            for p in enumerate_model_set_with_budget(&self.cps, &b.window, &area, budget)? {
                let mut v = self.offsets[j].clone();
                for (x, c) in v[..n].iter_mut().zip(&p.coords) {
                    *x += Rational::from_integer((*c).into());
                }
                out.push(v);
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Rank of the module generated by the sample over `region`.
    pub fn sampled_rank(&self, region: &Region, budget: u64) -> Result<usize> {
        rank_over_q(&self.sample(region, budget)?)
    }
}

fn shift_region(region: &Region, t: &[QuadScalar]) -> Region {
    match region {
        Region::Ball { center, radius_sq } => Region::Ball {
            center: center.iter().zip(t).map(|(c, s)| c - s).collect(),
            radius_sq: radius_sq.clone(),
        },
        Region::Box(b) => Region::Box(b.iter().zip(t).map(|((l, h), s)| (l - s, h - s)).collect()),
    }
}

/// A progression inside a [`MeyerExpr`], in module coordinates.
#[derive(Clone, Debug)]
pub struct MeyerAp {
    pub ap: ArithmeticProgression,
    pub branch: usize,
    /// All points lie within this distance of the requested centre; absent
    /// when the branch translate is symbolic.
    pub radius: Option<Rational>,
    pub construction: LiApConstruction,
}

/// Builds a progression in the first branch's model set and translates it.
pub fn li_ap_in_meyer(expr: &MeyerExpr, length: u64, y: &[QuadScalar], settings: &Settings) -> Result<MeyerAp> {
    let branch = &expr.branches[0];
    let (centre, radius_known) = match &branch.translate {
        Translate::Rational(t) => (y.iter().zip(t).map(|(a, b)| a - b).collect(), true),
        Translate::Symbolic { .. } => (y.to_vec(), false),
    };
    let construction = li_ap_in_model_set_with(&expr.cps, &branch.window, length, &centre, settings)?;
    let lift = |v: &RatVector| -> RatVector {
        let mut out = v.clone();
        out.resize(expr.module_dim(), Rational::zero());
        out
    };
    let mut base = lift(&construction.ap.base);
    for (x, t) in base.iter_mut().zip(&expr.offsets[0]) {
        *x += t;
    }
    let ratios = construction.ap.ratios.iter().map(lift).collect();
    let ap = ArithmeticProgression::new(base, ratios, length, CoordinateKind::Module)?;
    assert!(verify_ap(&ap, |p| expr.in_branch(0, p), None), "translated progression left its branch");
    assert_eq!(ap_rank(&ap), expr.cps.rank(), "translated progression lost rank");
    let radius = radius_known.then(|| construction.radius.clone());
    Ok(MeyerAp { ap, branch: 0, radius, construction })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpperTag {
    /// Rank of the module generated by a sample.
    ModuleRank,
    /// `d+m` for structured expressions over a `(d,m)` scheme.
    TheoremDPlusM,
}

impl UpperTag {
    pub fn as_str(self) -> &'static str {
        match self {
            UpperTag::ModuleRank => "module-rank",
            UpperTag::TheoremDPlusM => "theorem-d-plus-m",
        }
    }
}

/// Lower and upper bounds on the ap-rank.
#[derive(Clone, Debug)]
pub struct ApRankBracket {
    pub lower: usize,
    pub upper: usize,
    pub upper_tag: UpperTag,
    /// One verified progression of rank `lower` per tested length.
    pub certificates: Vec<ArithmeticProgression>,
    pub tested_lengths: Vec<u64>,
    /// Rank of the module generated by a sample, when it could be computed.
    pub sampled_rank: Option<usize>,
}

/// Certificates for lengths `1..=n_max`. Running out of budget shortens the
/// list of tested lengths.
pub fn aprank_bounds(expr: &MeyerExpr, n_max: u64, settings: &Settings) -> Result<ApRankBracket> {
    let rank = expr.cps.rank();
    let origin = vec![QuadScalar::zero(); expr.cps.phys_dim()];
    let mut certificates = Vec::new();
    let mut tested_lengths = Vec::new();
    for length in 1..=n_max {
        match li_ap_in_meyer(expr, length, &origin, settings) {
            Ok(c) => {
                assert!(verify_ap(&c.ap, |p| expr.contains(p), None));
                certificates.push(c.ap);
                tested_lengths.push(length);
            }
            Err(Error::BudgetExceeded { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    let region = Region::centered(expr.cps.phys_dim(), SAMPLE_RADIUS);
    let sampled_rank = match expr.sampled_rank(&region, settings.budget) {
        Ok(r) => Some(r),
        Err(Error::BudgetExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    let lower = if certificates.is_empty() { 1 } else { rank };
    Ok(ApRankBracket { lower, upper: rank, upper_tag: UpperTag::TheoremDPlusM, certificates, tested_lengths, sampled_rank })
}

/// Brackets for an unstructured finite sample: the upper bound is the
/// sample's module rank and the lower bound the largest `n` for which the
/// sample holds a linearly independent progression at every tested length.
pub fn aprank_bounds_for_sample(points: &[RatVector], n_max: u64, budget: u64) -> Result<ApRankBracket> {
    let upper = rank_over_q(points)?;
    let mut best = None;
    'rank: for n in (1..=upper).rev() {
        let mut found = Vec::new();
        for length in 1..=n_max {
            match brute_force_li_ap(points, n, length, CoordinateKind::Module, budget)? {
                Some(ap) => found.push(ap),
                None => continue 'rank,
            }
        }
        best = Some((n, found));
        break;
    }
    let (lower, certificates) = best.unwrap_or((upper.min(1), Vec::new()));
    let tested_lengths = if certificates.is_empty() { Vec::new() } else { (1..=n_max).collect() };
    Ok(ApRankBracket { lower, upper, upper_tag: UpperTag::ModuleRank, certificates, tested_lengths, sampled_rank: Some(upper) })
}

/// `Λ(W) ∪ (Λ(W)+t_1) ∪ … ∪ (Λ(W)+t_n)` with symbolic `t_i`, where `W` is
/// the unit cube of internal space.
pub fn rank_gap_example(cps: &CutProjectScheme, n: usize) -> Result<MeyerExpr> {
    let unit = vec![(QuadScalar::zero(), QuadScalar::one()); cps.int_dim()];
    let w = Window::closed_box(&unit)?;
    let mut branches = vec![Branch { translate: Translate::Rational(vec![QuadScalar::zero(); cps.phys_dim()]), window: w.clone() }];
    let roots = (2u64..).filter(|&p| (2..p).all(|k| p % k != 0) && p != cps.radicand());
    for (i, p) in roots.take(n).enumerate() {
        let mut approx = vec!["0".to_string(); cps.phys_dim()];
        if let Some(first) = approx.first_mut() {
            *first = QuadScalar::sqrt_of(p)?.to_decimal(20);
        }
        branches.push(Branch { translate: Translate::Symbolic { tag: format!("s{}", i + 1), approx }, window: w.clone() });
    }
    MeyerExpr::new(cps.clone(), branches)
}

/// A single model set `Λ'(W')` over a refined scheme containing `Λ`.
#[derive(Clone, Debug)]
pub struct Euclideanized {
    pub cps: CutProjectScheme,
    pub window: Window,
    /// Refinement factor `m`: the original lattice is `m·L'`.
    pub multiplier: u64,
    /// Internal lifts `g_j` of the translates.
    pub lifts: Vec<Vec<QuadScalar>>,
    pub sample_region: Region,
    /// Points of `Λ` checked inside `Λ'(W')`.
    pub sample_points: usize,
}

impl Euclideanized {
    /// Expression module coordinates of a refined lattice point.
    pub fn to_expr_coords(&self, z: &[i64]) -> RatVector {
        let m = BigInt::from(self.multiplier);
        z.iter().map(|&x| Rational::new(x.into(), m.clone())).collect()
    }

    /// Refined lattice coordinates of an expression point, if integral.
    pub fn to_refined_coords(&self, p: &[Rational]) -> Option<Vec<i64>> {
        let m = Rational::from_integer(self.multiplier.into());
        p.iter().map(|x| {
            let y = x * &m;
            y.is_integer().then(|| y.to_integer().to_i64()).flatten()
        }).collect()
    }
}

/// Rewrites a union of rationally translated model sets as one model set
/// over the lattice refined by the common denominator of the translates.
/// Fails with a rank gap as soon as a translate is symbolic.
pub fn euclideanize(expr: &MeyerExpr, settings: &Settings) -> Result<Euclideanized> {
    if let Some(tag) = expr.tags.first() {
        return Err(Error::RankGap { tag: tag.clone() });
    }
    let n = expr.cps.rank();
    let lcm = expr.offsets.iter().fold(BigInt::one(), |acc, o| acc.lcm(&lcm_of_denominators(&o[..n])));
    let multiplier = lcm.to_u64().ok_or_else(|| Error::Input("translate denominators are too large".into()))?;
    let refined = expr.cps.refine_lattice(multiplier)?;
    let mut lifts = Vec::with_capacity(expr.branches.len());
    for b in &expr.branches {
        let Translate::Rational(t) = &b.translate else { unreachable!("no tags") };
        lifts.push(refined.lift_translate(t)?);
    }
    let window = if expr.branches.len() == 1 {
        expr.branches[0].window.shifted(&lifts[0])
    } else {
        Window::union(lifts.iter().cloned().zip(expr.branches.iter().map(|b| b.window.clone())).collect())?
    };
    let sample_region = Region::centered(expr.cps.phys_dim(), SAMPLE_RADIUS);
    let sample = expr.sample(&sample_region, settings.budget)?;
    let mut out = Euclideanized { cps: refined, window, multiplier, lifts, sample_region, sample_points: sample.len() };
    for p in &sample {
        let z = out.to_refined_coords(p).expect("every point of the expression is in the refined lattice");
        assert!(out.window.contains(&out.cps.internal_of(&z)), "euclideanized window misses a point of the expression");
    }
    out.sample_points = sample.len();
    Ok(out)
}
