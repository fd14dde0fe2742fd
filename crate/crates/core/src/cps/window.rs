//! Windows in internal space and search regions in physical space.

use std::fmt;

use num_traits::Zero;

use crate::exact::{sqrt_upper, QuadScalar, Rational};
use crate::error::{Error, Result};

/// One axis of a box window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: QuadScalar,
    pub hi: QuadScalar,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn closed(lo: QuadScalar, hi: QuadScalar) -> Self {
        Self { lo, hi, lo_closed: true, hi_closed: true }
    }

    pub fn open(lo: QuadScalar, hi: QuadScalar) -> Self {
        Self { lo, hi, lo_closed: false, hi_closed: false }
    }

    pub fn contains(&self, x: &QuadScalar) -> bool {
        let above = (x - &self.lo).sign();
        let below = (&self.hi - x).sign();
        (above > 0 || (above == 0 && self.lo_closed)) && (below > 0 || (below == 0 && self.hi_closed))
    }

    pub fn width(&self) -> QuadScalar {
        &self.hi - &self.lo
    }

    fn shifted(&self, by: &QuadScalar) -> Self {
        Self { lo: &self.lo + by, hi: &self.hi + by, ..self.clone() }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{},{}{r}", self.lo, self.hi)
    }
}

/// A precompact window with nonempty interior, with exact membership.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Window {
    /// Product of intervals. Zero axes is the trivial window of `H = R^0`.
    Box(Vec<Interval>),
    Ball { center: Vec<QuadScalar>, radius_sq: Rational },
    /// `⋃ (shift + base)`.
    ShiftedUnion(Vec<(Vec<QuadScalar>, Window)>),
}

impl Window {
    pub fn boxed(axes: Vec<Interval>) -> Result<Self> {
        for (i, iv) in axes.iter().enumerate() {
            if iv.lo >= iv.hi {
                return Err(Error::InvalidWindow(format!("axis {i}: lower end {} is not below upper end {}", iv.lo, iv.hi)));
            }
        }
        Ok(Window::Box(axes))
    }

    pub fn ball(center: Vec<QuadScalar>, radius_sq: Rational) -> Result<Self> {
        if radius_sq <= Rational::zero() {
            return Err(Error::InvalidWindow("ball radius must be positive".into()));
        }
        if center.is_empty() {
            return Err(Error::InvalidWindow("ball window needs at least one axis".into()));
        }
        Ok(Window::Ball { center, radius_sq })
    }

    pub fn union(parts: Vec<(Vec<QuadScalar>, Window)>) -> Result<Self> {
        let Some((_, first)) = parts.first() else {
            return Err(Error::InvalidWindow("empty union".into()));
        };
        let dim = first.dim();
        for (shift, w) in &parts {
            if shift.len() != dim || w.dim() != dim {
                return Err(Error::InvalidWindow("union parts differ in dimension".into()));
            }
        }
        Ok(Window::ShiftedUnion(parts))
    }

    /// Closed interval on every axis.
    pub fn closed_box(bounds: &[(QuadScalar, QuadScalar)]) -> Result<Self> {
        Self::boxed(bounds.iter().map(|(l, h)| Interval::closed(l.clone(), h.clone())).collect())
    }

    /// The single point of `R^0`.
    pub fn trivial() -> Self {
        Window::Box(Vec::new())
    }

    pub fn dim(&self) -> usize {
        match self {
            Window::Box(axes) => axes.len(),
            Window::Ball { center, .. } => center.len(),
            Window::ShiftedUnion(parts) => parts[0].1.dim(),
        }
    }

    pub fn contains(&self, x: &[QuadScalar]) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        match self {
            Window::Box(axes) => axes.iter().zip(x).all(|(iv, xi)| iv.contains(xi)),
            Window::Ball { center, radius_sq } => {
                let dist: QuadScalar = center.iter().zip(x).map(|(c, xi)| (xi - c).square()).sum();
                (QuadScalar::from_rational(radius_sq.clone()) - dist).sign() >= 0
            }
            Window::ShiftedUnion(parts) => parts.iter().any(|(shift, w)| {
                let local: Vec<QuadScalar> = x.iter().zip(shift).map(|(xi, s)| xi - s).collect();
                w.contains(&local)
            }),
        }
    }

    /// Closed axis-aligned hull `[lo_i, hi_i]`.
    pub fn bounding_box(&self) -> Vec<(QuadScalar, QuadScalar)> {
        match self {
            Window::Box(axes) => axes.iter().map(|iv| (iv.lo.clone(), iv.hi.clone())).collect(),
            Window::Ball { center, radius_sq } => {
                let r = QuadScalar::from_rational(sqrt_upper(&QuadScalar::from_rational(radius_sq.clone()), 32));
                center.iter().map(|c| (c - &r, c + &r)).collect()
            }
            Window::ShiftedUnion(parts) => {
                let mut hull: Vec<(QuadScalar, QuadScalar)> = Vec::new();
                for (shift, w) in parts {
                    let b = w.bounding_box();
                    for (i, ((lo, hi), s)) in b.into_iter().zip(shift).enumerate() {
                        let (lo, hi) = (lo + s, hi + s);
                        match hull.get_mut(i) {
                            None => hull.push((lo, hi)),
                            Some(h) => {
                                if lo < h.0 {
                                    h.0 = lo;
                                }
                                if hi > h.1 {
                                    h.1 = hi;
                                }
                            }
                        }
                    }
                }
                hull
            }
        }
    }

    /// `shift + self`, keeping the representation when possible.
    pub fn shifted(&self, shift: &[QuadScalar]) -> Window {
        match self {
            Window::Box(axes) => Window::Box(axes.iter().zip(shift).map(|(iv, s)| iv.shifted(s)).collect()),
            Window::Ball { center, radius_sq } => Window::Ball {
                center: center.iter().zip(shift).map(|(c, s)| c + s).collect(),
                radius_sq: radius_sq.clone(),
            },
            Window::ShiftedUnion(parts) => Window::ShiftedUnion(
                parts
                    .iter()
                    .map(|(s0, w)| (s0.iter().zip(shift).map(|(a, b)| a + b).collect(), w.clone()))
                    .collect(),
            ),
        }
    }

    /// An open box contained in the window: the box itself, a box inscribed
    /// in a ball (rational half-width below `r/√m`), or the inscribed box of
    /// the first union part.
    pub fn inscribed_box(&self) -> Window {
        match self {
            Window::Box(axes) => Window::Box(
                axes.iter().map(|iv| Interval::open(iv.lo.clone(), iv.hi.clone())).collect(),
            ),
            Window::Ball { center, radius_sq } => {
                // h = 1/u with u ≥ √(m/r²), so h ≤ r/√m
                let m = Rational::from_integer((center.len() as i64).into());
                let ratio = QuadScalar::from_rational(&m / radius_sq);
                let h = sqrt_upper(&ratio, 16).recip();
                let h = QuadScalar::from_rational(h);
                Window::Box(center.iter().map(|c| Interval::open(c - &h, c + &h)).collect())
            }
            Window::ShiftedUnion(parts) => {
                let (shift, w) = &parts[0];
                w.inscribed_box().shifted(shift)
            }
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Window::Box(axes) if axes.is_empty() => write!(f, "{{0}}"),
            Window::Box(axes) => {
                let parts: Vec<String> = axes.iter().map(ToString::to_string).collect();
                write!(f, "{}", parts.join("x"))
            }
            Window::Ball { center, radius_sq } => {
                let c: Vec<String> = center.iter().map(ToString::to_string).collect();
                write!(f, "ball(({}), r^2={radius_sq})", c.join(","))
            }
            Window::ShiftedUnion(parts) => {
                let p: Vec<String> = parts
                    .iter()
                    .map(|(s, w)| {
                        let s: Vec<String> = s.iter().map(ToString::to_string).collect();
                        format!("({})+{w}", s.join(","))
                    })
                    .collect();
                write!(f, "{}", p.join(" u "))
            }
        }
    }
}

/// A bounded search region in physical space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Region {
    /// Closed ball `|x − center|² ≤ radius_sq`.
    Ball { center: Vec<QuadScalar>, radius_sq: Rational },
    /// Closed box.
    Box(Vec<(QuadScalar, QuadScalar)>),
}

impl Region {
    pub fn ball(center: Vec<QuadScalar>, radius: Rational) -> Result<Self> {
        if radius < Rational::zero() {
            return Err(Error::InvalidRegion("negative radius".into()));
        }
        Ok(Region::Ball { center, radius_sq: &radius * &radius })
    }

    /// `|x| ≤ radius` around the origin of `R^dim`.
    pub fn centered(dim: usize, radius: i64) -> Self {
        Region::Ball {
            center: vec![QuadScalar::zero(); dim],
            radius_sq: Rational::from_integer((radius * radius).into()),
        }
    }

    pub fn boxed(bounds: Vec<(QuadScalar, QuadScalar)>) -> Result<Self> {
        if bounds.iter().any(|(l, h)| l > h) {
            return Err(Error::InvalidRegion("box with lower end above upper end".into()));
        }
        Ok(Region::Box(bounds))
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::Ball { center, .. } => center.len(),
            Region::Box(b) => b.len(),
        }
    }

    pub fn contains(&self, x: &[QuadScalar]) -> bool {
        match self {
            Region::Ball { center, radius_sq } => {
                let dist: QuadScalar = center.iter().zip(x).map(|(c, xi)| (xi - c).square()).sum();
                (QuadScalar::from_rational(radius_sq.clone()) - dist).sign() >= 0
            }
            Region::Box(b) => b.iter().zip(x).all(|((l, h), xi)| l <= xi && xi <= h),
        }
    }

    pub fn bounding_box(&self) -> Vec<(QuadScalar, QuadScalar)> {
        match self {
            Region::Ball { center, radius_sq } => {
                let r = QuadScalar::from_rational(sqrt_upper(&QuadScalar::from_rational(radius_sq.clone()), 32));
                center.iter().map(|c| (c - &r, c + &r)).collect()
            }
            Region::Box(b) => b.clone(),
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Ball { center, radius_sq } => {
                let c: Vec<String> = center.iter().map(ToString::to_string).collect();
                write!(f, "|x-({})|^2<={radius_sq}", c.join(","))
            }
            Region::Box(b) => {
                let p: Vec<String> = b.iter().map(|(l, h)| format!("[{l},{h}]")).collect();
                write!(f, "{}", p.join("x"))
            }
        }
    }
}
