//! Fully Euclidean cut-and-project schemes `(R^d, R^m, L)` with exact
//! quadratic coordinates.

mod certificate;
mod enumerate;
pub mod io;
mod window;

use std::cmp::Ordering;
use std::fmt;

use num_traits::One;
use serde::{Deserialize, Serialize};

pub use certificate::{delone_certificate, meyer_certificate, nearest_distance_sq_bound, DeloneCertificate};
pub use enumerate::{enumerate_model_set, enumerate_model_set_with_budget, integer_search_box, DEFAULT_ENUMERATION_BUDGET};
pub use window::{Interval, Region, Window};

pub(crate) use certificate::grid_covering_bound;

use crate::error::{Error, Result};
use crate::exact::{
    flatten_quad, is_integral, quad_determinant, quad_inverse, rank_over_q, solve_rational, QuadScalar, RatVector,
    Rational,
};

/// One lattice generator `v_j = (physical, internal)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub physical: Vec<QuadScalar>,
    pub internal: Vec<QuadScalar>,
}

impl Generator {
    pub fn new(physical: Vec<QuadScalar>, internal: Vec<QuadScalar>) -> Self {
        Self { physical, internal }
    }
}

/// What is known about density of the internal projection `π^H(L)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityStatus {
    /// Established by an exact argument (built-ins, or an exact check for `m = 1`).
    Proved,
    /// Asserted by the caller and not checked.
    Assumed,
    /// No decision procedure applies.
    Unverified,
    /// Shown not dense by an exact necessary condition.
    Failed,
    /// `m = 0`: `H` is trivial.
    Vacuous,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub lattice_invertible: bool,
    pub projection_injective: bool,
    pub density: DensityStatus,
    pub determinant: String,
}

impl ValidationReport {
    pub fn passes(&self) -> bool {
        self.lattice_invertible && self.projection_injective && self.density != DensityStatus::Failed
    }
}

#[derive(Clone, Debug)]
pub struct CutProjectScheme {
    phys_dim: usize,
    int_dim: usize,
    radicand: u64,
    generators: Vec<Generator>,
    density_claim: Option<DensityStatus>,
    name: Option<String>,
    /// `z = inverse · (physical ++ internal)`, when the lattice matrix is invertible.
    inverse: Option<Vec<Vec<QuadScalar>>>,
}

impl PartialEq for CutProjectScheme {
    fn eq(&self, other: &Self) -> bool {
        self.phys_dim == other.phys_dim
            && self.int_dim == other.int_dim
            && self.radicand == other.radicand
            && self.generators == other.generators
    }
}

impl Eq for CutProjectScheme {}

impl CutProjectScheme {
    /// Builds a scheme after structural checks (generator count and shapes,
    /// one ambient field). Lattice and projection conditions are reported by
    /// [`validate`](Self::validate); operations needing them refuse invalid schemes.
    pub fn new(
        phys_dim: usize,
        int_dim: usize,
        radicand: u64,
        generators: Vec<Generator>,
        density_claim: Option<DensityStatus>,
    ) -> Result<Self> {
        if phys_dim == 0 {
            return Err(Error::InvalidScheme("physical dimension must be positive".into()));
        }
        if !crate::exact::is_square_free(radicand) {
            return Err(Error::InvalidScheme(format!("radicand {radicand} is not square-free")));
        }
        if generators.len() != phys_dim + int_dim {
            return Err(Error::InvalidScheme(format!(
                "expected {} generators, got {}",
                phys_dim + int_dim,
                generators.len()
            )));
        }
        for (j, g) in generators.iter().enumerate() {
            if g.physical.len() != phys_dim || g.internal.len() != int_dim {
                return Err(Error::InvalidScheme(format!("generator {j} has the wrong shape")));
            }
            if let Some(x) = g.physical.iter().chain(&g.internal).find(|x| x.radicand() != 1 && x.radicand() != radicand) {
                return Err(Error::InvalidScheme(format!("generator {j} entry {x} is outside Q(sqrt({radicand}))")));
            }
        }
        let inverse = quad_inverse(&Self::full_matrix(&generators)).ok();
        Ok(Self { phys_dim, int_dim, radicand, generators, density_claim, name: None, inverse })
    }

    fn full_matrix(generators: &[Generator]) -> Vec<Vec<QuadScalar>> {
        let n = generators.len();
        (0..n)
            .map(|k| {
                generators
                    .iter()
                    .map(|g| if k < g.physical.len() { g.physical[k].clone() } else { g.internal[k - g.physical.len()].clone() })
                    .collect()
            })
            .collect()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn phys_dim(&self) -> usize {
        self.phys_dim
    }

    pub fn int_dim(&self) -> usize {
        self.int_dim
    }

    /// `d + m`, the rank of the lattice.
    pub fn rank(&self) -> usize {
        self.phys_dim + self.int_dim
    }

    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn density_claim(&self) -> Option<DensityStatus> {
        self.density_claim
    }

    pub(crate) fn inverse(&self) -> Option<&Vec<Vec<QuadScalar>>> {
        self.inverse.as_ref()
    }

    fn flattened_physical(&self) -> Vec<RatVector> {
        self.generators.iter().map(|g| flatten_quad(&g.physical)).collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let det = quad_determinant(&Self::full_matrix(&self.generators)).expect("square by construction");
        let projection_injective = rank_over_q(&self.flattened_physical()).expect("uniform shapes") == self.rank();
        ValidationReport {
            lattice_invertible: !det.is_zero(),
            projection_injective,
            density: self.density_status(),
            determinant: det.to_string(),
        }
    }

    fn density_status(&self) -> DensityStatus {
        if self.int_dim == 0 {
            return DensityStatus::Vacuous;
        }
        if self.density_claim == Some(DensityStatus::Proved) {
            return DensityStatus::Proved;
        }
        // A finitely generated subgroup of R is dense iff its rank is at least 2.
        let axis_rank = |axis: usize| {
            let coords: Vec<RatVector> = self.generators.iter().map(|g| flatten_quad(&g.internal[axis..=axis])).collect();
            rank_over_q(&coords).expect("uniform shapes")
        };
        if self.int_dim == 1 {
            return if axis_rank(0) >= 2 { DensityStatus::Proved } else { DensityStatus::Failed };
        }
        // Necessary conditions for m >= 2: every axis projection dense, and the
        // internal parts span R^m.
        let internal: Vec<Vec<QuadScalar>> = self.generators.iter().map(|g| g.internal.clone()).collect();
        let spans = quad_rank(&internal) == self.int_dim;
        if !spans || (0..self.int_dim).any(|a| axis_rank(a) < 2) {
            return DensityStatus::Failed;
        }
        match self.density_claim {
            Some(DensityStatus::Assumed) => DensityStatus::Assumed,
            _ => DensityStatus::Unverified,
        }
    }

    /// Errors unless the lattice matrix is invertible and the physical
    /// projection is injective.
    pub fn require_valid(&self) -> Result<()> {
        let r = self.validate();
        if !r.lattice_invertible {
            return Err(Error::InvalidScheme("lattice matrix is singular".into()));
        }
        if !r.projection_injective {
            return Err(Error::InvalidScheme("physical projection is not injective on the lattice".into()));
        }
        Ok(())
    }

    fn combine(&self, z: &[i64], part: impl Fn(&Generator) -> &Vec<QuadScalar>, dim: usize) -> Vec<QuadScalar> {
        let mut out = vec![QuadScalar::zero(); dim];
        for (zj, g) in z.iter().zip(&self.generators) {
            if *zj == 0 {
                continue;
            }
            for (o, x) in out.iter_mut().zip(part(g)) {
                *o += &x.scale_int(*zj);
            }
        }
        out
    }

    /// The lattice point with integer coordinates `z` and its star image.
    pub fn star(&self, z: &[i64]) -> LatticePoint {
        assert_eq!(z.len(), self.rank(), "coordinate vector has the wrong length");
        LatticePoint {
            coords: z.to_vec(),
            physical: self.combine(z, |g| &g.physical, self.phys_dim),
            internal: self.combine(z, |g| &g.internal, self.int_dim),
        }
    }

    pub fn physical_of(&self, z: &[i64]) -> Vec<QuadScalar> {
        self.combine(z, |g| &g.physical, self.phys_dim)
    }

    pub fn internal_of(&self, z: &[i64]) -> Vec<QuadScalar> {
        self.combine(z, |g| &g.internal, self.int_dim)
    }

    /// Physical image of rational coordinates.
    pub fn physical_of_rational(&self, z: &[Rational]) -> Vec<QuadScalar> {
        let mut out = vec![QuadScalar::zero(); self.phys_dim];
        for (zj, g) in z.iter().zip(&self.generators) {
            for (o, x) in out.iter_mut().zip(&g.physical) {
                *o += &x.scale(zj);
            }
        }
        out
    }

    pub fn internal_of_rational(&self, z: &[Rational]) -> Vec<QuadScalar> {
        let mut out = vec![QuadScalar::zero(); self.int_dim];
        for (zj, g) in z.iter().zip(&self.generators) {
            for (o, x) in out.iter_mut().zip(&g.internal) {
                *o += &x.scale(zj);
            }
        }
        out
    }

    /// Generators divided by `n`; the old lattice is the index-`n^(d+m)`
    /// sublattice `n·L'` of the result.
    pub fn refine_lattice(&self, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("refinement factor must be positive".into()));
        }
        let k = Rational::new(One::one(), (n as i64).into());
        let generators = self
            .generators
            .iter()
            .map(|g| Generator {
                physical: g.physical.iter().map(|x| x.scale(&k)).collect(),
                internal: g.internal.iter().map(|x| x.scale(&k)).collect(),
            })
            .collect();
        let mut refined = Self::new(self.phys_dim, self.int_dim, self.radicand, generators, self.density_claim)?;
        refined.name = self.name.as_ref().map(|s| if n == 1 { s.clone() } else { format!("{s}/{n}") });
        Ok(refined)
    }

    /// Rational coordinates of a physical vector in the Q-span of the
    /// physical generators (unique by injectivity), or `None` outside it.
    pub fn rational_coords(&self, t: &[QuadScalar]) -> Result<Option<RatVector>> {
        if t.len() != self.phys_dim {
            return Err(Error::DimensionMismatch { expected: self.phys_dim, found: t.len() });
        }
        self.require_valid()?;
        if t.iter().any(|x| x.radicand() != 1 && x.radicand() != self.radicand) {
            return Ok(None);
        }
        solve_rational(&self.flattened_physical(), &flatten_quad(t))
    }

    /// The unique internal vector `g` with `(t, g)` in the lattice.
    pub fn lift_translate(&self, t: &[QuadScalar]) -> Result<Vec<QuadScalar>> {
        match self.rational_coords(t)? {
            Some(z) if is_integral(&z) => Ok(self.internal_of_rational(&z)),
            _ => Err(Error::NotInLattice),
        }
    }

    /// True when every coordinate is rational (e.g. plain integer lattices).
    pub fn is_rational(&self) -> bool {
        self.generators.iter().all(|g| g.physical.iter().chain(&g.internal).all(QuadScalar::is_rational))
    }
}

fn quad_rank(rows: &[Vec<QuadScalar>]) -> usize {
    let mut a = rows.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, p);
        let inv = a[rank][c].recip().expect("nonzero");
        for r in rank + 1..a.len() {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] * &inv;
            for j in c..cols {
                let t = &f * &a[rank][j];
                a[r][j] -= &t;
            }
        }
        rank += 1;
    }
    rank
}

/// A lattice point `Σ z_j v_j`, with cached physical and internal parts.
/// Equality and order are by integer coordinates.
#[derive(Clone, Debug)]
pub struct LatticePoint {
    pub coords: Vec<i64>,
    pub physical: Vec<QuadScalar>,
    pub internal: Vec<QuadScalar>,
}

impl LatticePoint {
    pub fn coords_rational(&self) -> RatVector {
        self.coords.iter().map(|&c| Rational::from_integer(c.into())).collect()
    }
}

impl PartialEq for LatticePoint {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords
    }
}

impl Eq for LatticePoint {}

impl PartialOrd for LatticePoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LatticePoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coords.cmp(&other.coords)
    }
}

impl std::hash::Hash for LatticePoint {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coords.hash(state);
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self.physical.iter().map(ToString::to_string).collect();
        write!(f, "{:?} -> ({})", self.coords, p.join(", "))
    }
}

fn q(s: &str) -> QuadScalar {
    s.parse().expect("built-in literal")
}

/// Standard example schemes: `fibonacci`, `silver_mean`, `ammann_beenker`,
/// and `integer_lattice(d)`.
pub fn builtin(name: &str) -> Result<CutProjectScheme> {
    let name = name.trim();
    let scheme = match name {
        "fibonacci" => CutProjectScheme::new(
            1,
            1,
            5,
            vec![
                Generator::new(vec![q("1")], vec![q("1")]),
                Generator::new(vec![q("1/2+1/2*sqrt(5)")], vec![q("1/2-1/2*sqrt(5)")]),
            ],
            Some(DensityStatus::Proved),
        )?,
        "silver_mean" => CutProjectScheme::new(
            1,
            1,
            2,
            vec![
                Generator::new(vec![q("1")], vec![q("1")]),
                Generator::new(vec![q("1+1*sqrt(2)")], vec![q("1-1*sqrt(2)")]),
            ],
            Some(DensityStatus::Proved),
        )?,
        "ammann_beenker" => {
            // e_k = (cos kπ/4, sin kπ/4), star = conjugation √2 ↦ −√2
            let h = q("0+1/2*sqrt(2)");
            let phys = [
                vec![q("1"), q("0")],
                vec![h.clone(), h.clone()],
                vec![q("0"), q("1")],
                vec![-&h, h.clone()],
            ];
            let generators = phys
                .iter()
                .map(|p| Generator::new(p.clone(), p.iter().map(QuadScalar::conjugate).collect()))
                .collect();
            CutProjectScheme::new(2, 2, 2, generators, Some(DensityStatus::Proved))?
        }
        _ => {
            let d = name
                .strip_prefix("integer_lattice(")
                .and_then(|rest| rest.strip_suffix(')'))
                .and_then(|n| n.trim().parse::<usize>().ok())
                .filter(|&d| d >= 1)
                .ok_or_else(|| Error::UnknownBuiltin(name.to_string()))?;
            let generators = (0..d)
                .map(|j| Generator::new((0..d).map(|k| QuadScalar::from_int((j == k) as i64)).collect(), vec![]))
                .collect();
            CutProjectScheme::new(d, 0, 1, generators, Some(DensityStatus::Vacuous))?
        }
    };
    Ok(scheme.with_name(name))
}

pub fn integer_lattice(d: usize) -> CutProjectScheme {
    builtin(&format!("integer_lattice({d})")).expect("positive dimension")
}

pub fn add_coords(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_validates_with_proved_density() {
        let r = builtin("fibonacci").unwrap().validate();
        assert!(r.lattice_invertible && r.projection_injective);
        assert_eq!(r.density, DensityStatus::Proved);
        assert!(r.passes());
    }

    #[test]
    fn rational_internal_projection_is_not_dense() {
        let cps = CutProjectScheme::new(
            1,
            1,
            1,
            vec![Generator::new(vec![q("1")], vec![q("0")]), Generator::new(vec![q("0")], vec![q("1")])],
            None,
        )
        .unwrap();
        let r = cps.validate();
        assert!(r.lattice_invertible);
        // physical parts 1 and 0: a·1 + b·0 = 0 forces a = 0 but not b
        assert!(!r.projection_injective);
        assert_eq!(r.density, DensityStatus::Failed);
        assert!(!r.passes());
    }

    #[test]
    fn exact_density_decision_for_one_internal_axis() {
        let cps = CutProjectScheme::new(
            1,
            1,
            5,
            vec![Generator::new(vec![q("1")], vec![q("1")]), Generator::new(vec![q("0+1*sqrt(5)")], vec![q("0-1*sqrt(5)")])],
            None,
        )
        .unwrap();
        assert_eq!(cps.validate().density, DensityStatus::Proved);
    }

    #[test]
    fn integer_lattice_is_degenerate_scheme() {
        let cps = builtin("integer_lattice(3)").unwrap();
        assert_eq!((cps.phys_dim(), cps.int_dim()), (3, 0));
        let r = cps.validate();
        assert!(r.passes());
        assert_eq!(r.density, DensityStatus::Vacuous);
    }

    #[test]
    fn ammann_beenker_validates() {
        let cps = builtin("ammann_beenker").unwrap();
        assert!(cps.require_valid().is_ok());
        assert_eq!(cps.rank(), 4);
    }

    #[test]
    fn unknown_builtin() {
        assert_eq!(builtin("penrose").unwrap_err(), Error::UnknownBuiltin("penrose".into()));
        assert!(builtin("integer_lattice(0)").is_err());
    }

    #[test]
    fn star_examples() {
        let cps = builtin("fibonacci").unwrap();
        let p = cps.star(&[1, 0]);
        assert_eq!((p.physical[0].clone(), p.internal[0].clone()), (q("1"), q("1")));
        let p = cps.star(&[0, 0]);
        assert!(p.physical[0].is_zero() && p.internal[0].is_zero());
        let p = cps.star(&[1, 1]);
        assert_eq!(p.physical[0], q("3/2+1/2*sqrt(5)"));
        assert_eq!(p.internal[0], q("3/2-1/2*sqrt(5)"));
        let silver = builtin("silver_mean").unwrap();
        assert_eq!(silver.star(&[0, 1]).internal[0], q("1-1*sqrt(2)"));
    }

    #[test]
    fn refine_and_lift() {
        let cps = builtin("fibonacci").unwrap();
        assert_eq!(cps.refine_lattice(1).unwrap(), cps);
        let r3 = cps.refine_lattice(3).unwrap();
        assert_eq!(r3.generators()[0].physical[0], q("1/3"));
        assert_eq!(r3.generators()[1].internal[0], q("1/6-1/6*sqrt(5)"));
        assert_eq!(r3.star(&[3, 0]).physical, cps.star(&[1, 0]).physical);
        assert!(r3.validate().passes());
        assert!(cps.refine_lattice(0).is_err());

        assert_eq!(r3.lift_translate(&[q("1/3")]).unwrap(), vec![q("1/3")]);
        assert_eq!(cps.lift_translate(&[q("0")]).unwrap(), vec![q("0")]);
        assert_eq!(cps.lift_translate(&[q("1/3")]).unwrap_err(), Error::NotInLattice);
        assert_eq!(cps.lift_translate(&[q("0+1*sqrt(2)")]).unwrap_err(), Error::NotInLattice);

        let half = integer_lattice(1).refine_lattice(2).unwrap();
        assert_eq!(half.star(&[1]).physical[0], q("1/2"));
    }
}
