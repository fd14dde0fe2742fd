//! Monochromatic grids in coloured cubes `{0,…,N}^d`, and moving
//! progressions across finite-translate coverings by colouring.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{RatVector, Rational};
use crate::progression::{ap_rank, ArithmeticProgression, CoefficientCube};

/// `{ (l_j + m_j k_j) : m ∈ {0..n}^d }`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    pub offsets: Vec<u64>,
    pub steps: Vec<u64>,
    pub depth: u64,
}

impl Grid {
    pub fn dim(&self) -> usize {
        self.offsets.len()
    }

    pub fn point(&self, m: &[u64]) -> Vec<u64> {
        self.offsets.iter().zip(&self.steps).zip(m).map(|((l, k), m)| l + m * k).collect()
    }

    fn fits(&self, size: u64) -> bool {
        self.offsets.iter().zip(&self.steps).all(|(l, k)| l + self.depth * k <= size)
    }
}

/// `(n+1)^d` points, lexicographic in `m`.
pub fn grid_points(g: &Grid) -> Vec<Vec<u64>> {
    CoefficientCube::new(g.dim(), g.depth).map(|m| g.point(&m)).collect()
}

/// A total colouring of `{0,…,N}^d` with colours `0..r`, stored in
/// lexicographic point order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeColoring {
    size: u64,
    dim: usize,
    num_colors: u32,
    colors: Vec<u32>,
}

impl CubeColoring {
    pub fn new(size: u64, dim: usize, num_colors: u32, colors: Vec<u32>) -> Result<Self> {
        if num_colors == 0 {
            return Err(Error::Input("at least one colour is required".into()));
        }
        let expected = cube_len(size, dim).ok_or_else(|| Error::Input("cube too large".into()))?;
        if colors.len() != expected {
            return Err(Error::Input(format!("expected {expected} colours, found {}", colors.len())));
        }
        if let Some(c) = colors.iter().find(|&&c| c >= num_colors) {
            return Err(Error::Input(format!("colour {c} out of range 0..{num_colors}")));
        }
        Ok(Self { size, dim, num_colors, colors })
    }

    pub fn from_fn(size: u64, dim: usize, num_colors: u32, f: impl Fn(&[u64]) -> u32) -> Result<Self> {
        let colors = CoefficientCube::new(dim, size).map(|p| f(&p)).collect();
        Self::new(size, dim, num_colors, colors)
    }

    /// One-dimensional colouring from a digit string such as `"01100110"`.
    pub fn from_digits(digits: &str) -> Result<Self> {
        let colors: Vec<u32> = digits
            .chars()
            .map(|c| c.to_digit(10).ok_or_else(|| Error::Input(format!("bad colour digit {c:?}"))))
            .collect::<Result<_>>()?;
        if colors.is_empty() {
            return Err(Error::Input("empty colouring".into()));
        }
        let r = colors.iter().max().copied().unwrap_or(0) + 1;
        Self::new(colors.len() as u64 - 1, 1, r, colors)
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_colors(&self) -> u32 {
        self.num_colors
    }

    pub fn color(&self, p: &[u64]) -> u32 {
        let idx = p.iter().fold(0usize, |acc, &x| acc * (self.size as usize + 1) + x as usize);
        self.colors[idx]
    }
}

fn cube_len(size: u64, dim: usize) -> Option<usize> {
    usize::try_from(size.checked_add(1)?.checked_pow(dim as u32)?).ok()
}

/// Header `N d r`, then one colour per cube point in lexicographic order.
/// Blank lines and `#` comments are ignored.
impl FromStr for CubeColoring {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut tokens = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .flat_map(str::split_whitespace);
        let mut header = |what: &str| -> Result<u64> {
            let t = tokens.next().ok_or_else(|| Error::Input(format!("missing {what} in colouring header")))?;
            t.parse().map_err(|_| Error::Input(format!("bad {what} {t:?} in colouring header")))
        };
        let size = header("N")?;
        let dim = header("d")? as usize;
        let r = header("r")?;
        let r = u32::try_from(r).map_err(|_| Error::Input("too many colours".into()))?;
        let colors = tokens
            .map(|t| t.parse::<u32>().map_err(|_| Error::Input(format!("bad colour {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(size, dim, r, colors)
    }
}

impl fmt::Display for CubeColoring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {}", self.size, self.dim, self.num_colors)?;
        for c in &self.colors {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

fn is_mono(coloring: &CubeColoring, g: &Grid) -> bool {
    let mut pts = CoefficientCube::new(g.dim(), g.depth).map(|m| g.point(&m));
    let first = coloring.color(&pts.next().expect("grids are nonempty"));
    pts.all(|p| coloring.color(&p) == first)
}

fn first_mono_at(coloring: &CubeColoring, offsets: Vec<u64>, depth: u64) -> Option<Grid> {
    let n = coloring.size();
    // largest admissible step per axis
    let max_steps: Vec<u64> = offsets.iter().map(|&l| (n - l).checked_div(depth).unwrap_or(1)).collect();
    if max_steps.contains(&0) {
        return None;
    }
    let mut steps = vec![1u64; offsets.len()];
    loop {
        let g = Grid { offsets: offsets.clone(), steps: steps.clone(), depth };
        if is_mono(coloring, &g) {
            return Some(g);
        }
        let mut k = steps.len();
        loop {
            if k == 0 {
                return None;
            }
            k -= 1;
            if steps[k] < max_steps[k] {
                steps[k] += 1;
                break;
            }
            steps[k] = 1;
        }
    }
}

/// Exhaustive search, offsets in the outer loop and steps in the inner loop,
/// both lexicographic. The first grid in that order is returned.
pub fn find_mono_grid(coloring: &CubeColoring, depth: u64) -> Option<Grid> {
    let offsets: Vec<Vec<u64>> = CoefficientCube::new(coloring.dim(), coloring.size()).collect();
    let found = offsets
        .into_par_iter()
        .enumerate()
        .filter_map(|(i, l)| first_mono_at(coloring, l, depth).map(|g| (i, g)))
        .min_by_key(|(i, _)| *i)
        .map(|(_, g)| g);
    if let Some(g) = &found {
        assert!(g.fits(coloring.size()) && is_mono(coloring, g), "grid search returned an invalid grid");
    }
    found
}

/// Output of [`transfer_ap`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transfer {
    /// Progression `s + Σ l_j r_j − f` with ratios `k_j r_j`.
    pub ap: ArithmeticProgression,
    /// Index of the translate whose colour class won.
    pub translate: usize,
    pub grid: Grid,
}

/// Colours the coefficient cube of `ap` by the translate each point is
/// assigned to, then extracts a monochromatic grid of depth `depth` and
/// moves it back by that translate.
pub fn transfer_ap(
    ap: &ArithmeticProgression,
    translates: &[RatVector],
    decompose: impl Fn(&RatVector) -> Option<usize>,
    depth: u64,
) -> Result<Transfer> {
    if translates.is_empty() {
        return Err(Error::Precondition("at least one translate is required".into()));
    }
    if let Some(t) = translates.iter().find(|t| t.len() != ap.ambient_dim()) {
        return Err(Error::DimensionMismatch { expected: ap.ambient_dim(), found: t.len() });
    }
    let rank = ap_rank(ap);
    if rank != ap.dimension() {
        return Err(Error::Precondition("transfer needs linearly independent ratios".into()));
    }
    let mut colors = Vec::new();
    for c in ap.coefficients() {
        let p = ap.point(&c);
        match decompose(&p) {
            Some(j) if j < translates.len() => colors.push(j as u32),
            Some(j) => return Err(Error::Precondition(format!("decomposition returned unknown translate {j}"))),
            None => return Err(Error::Precondition("decomposition undefined on a progression point".into())),
        }
    }
    let coloring = CubeColoring::new(ap.length, ap.dimension(), translates.len() as u32, colors)?;
    let grid = find_mono_grid(&coloring, depth).ok_or(Error::NoMonoGrid {
        depth,
        size: ap.length,
        dim: ap.dimension(),
    })?;
    let j = coloring.color(&grid.offsets) as usize;

    let mut base = ap.point(&grid.offsets);
    for (x, f) in base.iter_mut().zip(&translates[j]) {
        *x -= f;
    }
    let ratios = ap
        .ratios
        .iter()
        .zip(&grid.steps)
        .map(|(r, &k)| {
            let k = Rational::from_integer(k.into());
            r.iter().map(|x| x * &k).collect()
        })
        .collect();
    let out = ArithmeticProgression::new(base, ratios, depth, ap.kind)?;
    assert_eq!(ap_rank(&out), rank, "positive multiples of independent ratios stay independent");
    Ok(Transfer { ap: out, translate: j, grid })
}

/// Retries [`transfer_ap`] on progressions built by `build(N')` with `N'`
/// doubling from `depth` until a monochromatic grid appears or `N'`
/// passes `max_length`.
pub fn transfer_with_doubling(
    mut build: impl FnMut(u64) -> Result<ArithmeticProgression>,
    translates: &[RatVector],
    decompose: impl Fn(&RatVector) -> Option<usize>,
    depth: u64,
    max_length: u64,
) -> Result<Transfer> {
    let mut length = depth.max(1);
    loop {
        let ap = build(length)?;
        match transfer_ap(&ap, translates, &decompose, depth) {
            Err(Error::NoMonoGrid { .. }) if length < max_length => length = (length * 2).min(max_length),
            other => return other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_vec_from_ints;
    use crate::progression::ap_points;

    #[test]
    fn grid_points_examples() {
        let g = Grid { offsets: vec![0], steps: vec![2], depth: 2 };
        assert_eq!(grid_points(&g), vec![vec![0], vec![2], vec![4]]);
        let g = Grid { offsets: vec![0, 0], steps: vec![1, 1], depth: 1 };
        assert_eq!(grid_points(&g), vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        let g = Grid { offsets: vec![3], steps: vec![5], depth: 1 };
        assert_eq!(grid_points(&g), vec![vec![3], vec![8]]);
    }

    #[test]
    fn single_colour_gives_unit_grid() {
        let c = CubeColoring::from_fn(4, 2, 1, |_| 0).unwrap();
        let g = find_mono_grid(&c, 3).unwrap();
        assert_eq!(g, Grid { offsets: vec![0, 0], steps: vec![1, 1], depth: 3 });
        assert!(find_mono_grid(&c, 5).is_none());
    }

    #[test]
    fn alternating_and_blocking_colourings() {
        let c = CubeColoring::from_digits("010101010").unwrap();
        assert_eq!(find_mono_grid(&c, 2), Some(Grid { offsets: vec![0], steps: vec![2], depth: 2 }));
        let c = CubeColoring::from_digits("01100110").unwrap();
        assert_eq!(find_mono_grid(&c, 2), None);
    }

    #[test]
    fn coloring_file_round_trip() {
        let c: CubeColoring = "# demo\n1 2 2\n0 1\n1 0\n".parse().unwrap();
        assert_eq!(c.color(&[1, 0]), 1);
        assert_eq!(c.to_string().parse::<CubeColoring>().unwrap(), c);
        assert!("1 1 2\n0 2\n".parse::<CubeColoring>().is_err());
        assert!("2 1 2\n0 1\n".parse::<CubeColoring>().is_err());
    }

    #[test]
    fn transfer_single_translate_shifts() {
        let ap = ArithmeticProgression::from_lattice(&[0, 0], &[vec![1, 0], vec![0, 1]], 3).unwrap();
        let f = rat_vec_from_ints(&[2, 5]);
        let t = transfer_ap(&ap, std::slice::from_ref(&f), |_| Some(0), 2).unwrap();
        assert_eq!(t.ap.base, rat_vec_from_ints(&[-2, -5]));
        assert_eq!(t.ap.ratios, ap.ratios);
    }

    #[test]
    fn transfer_alternating_doubles_ratio() {
        let ap = ArithmeticProgression::from_lattice(&[0], &[vec![1]], 8).unwrap();
        let translates = [rat_vec_from_ints(&[0]), rat_vec_from_ints(&[1])];
        let parity = |p: &RatVector| Some((p[0].to_integer() % 2u32 != 0.into()) as usize);
        let t = transfer_ap(&ap, &translates, parity, 2).unwrap();
        assert_eq!(t.ap.ratios, vec![rat_vec_from_ints(&[2])]);
        let inputs = ap_points(&ap, 100).unwrap();
        for p in ap_points(&t.ap, 100).unwrap() {
            let orig: RatVector = p.iter().zip(&translates[t.translate]).map(|(a, b)| a + b).collect();
            assert!(inputs.contains(&orig) && parity(&orig) == Some(t.translate));
        }
    }

    #[test]
    fn transfer_rejects_partial_decomposition() {
        let ap = ArithmeticProgression::from_lattice(&[0], &[vec![1]], 4).unwrap();
        let r = transfer_ap(&ap, &[rat_vec_from_ints(&[0])], |p| (p[0] < Rational::from_integer(3.into())).then_some(0), 1);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn transfer_reports_missing_grid() {
        let ap = ArithmeticProgression::from_lattice(&[0], &[vec![1]], 7).unwrap();
        let pattern = [0, 1, 1, 0, 0, 1, 1, 0];
        let translates = [rat_vec_from_ints(&[0]), rat_vec_from_ints(&[0])];
        let r = transfer_ap(&ap, &translates, |p| Some(pattern[p[0].to_integer().try_into().unwrap_or(0usize)]), 2);
        assert!(matches!(r, Err(Error::NoMonoGrid { .. })));
    }
}
