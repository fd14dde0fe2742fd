//! Real quadratic scalars `a + b·√D` with rational `a`, `b`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;
use crate::error::{Error, Result};

/// An exact real number `a + b·√D`.
///
/// The radicand `D` is either `1` (the value is rational, `b == 0`) or a
/// square-free integer greater than one. Values whose `b` part vanishes are
/// normalized to radicand `1`, so a rational value interoperates with every
/// quadratic field. Mixing two different non-trivial radicands is a logic
/// error and panics.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadScalar {
    a: Rational,
    b: Rational,
    radicand: u64,
}

pub fn is_square_free(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut k = 2u64;
    while k * k <= n {
        if n.is_multiple_of(k * k) {
            return false;
        }
        k += 1;
    }
    true
}

fn join_radicand(lhs: u64, rhs: u64) -> u64 {
    match (lhs, rhs) {
        (1, r) | (r, 1) => r,
        (l, r) if l == r => l,
        (l, r) => panic!("mixed quadratic fields sqrt({l}) and sqrt({r})"),
    }
}

impl QuadScalar {
    pub fn new(a: Rational, b: Rational, radicand: u64) -> Result<Self> {
        if !is_square_free(radicand) {
            return Err(Error::Input(format!("radicand {radicand} is not square-free")));
        }
        Ok(Self::normalized(a, b, radicand))
    }

    fn normalized(a: Rational, b: Rational, radicand: u64) -> Self {
        if radicand == 1 {
            Self { a: a + b, b: Rational::zero(), radicand: 1 }
        } else if b.is_zero() {
            Self { a, b, radicand: 1 }
        } else {
            Self { a, b, radicand }
        }
    }

    pub fn from_rational(a: Rational) -> Self {
        Self { a, b: Rational::zero(), radicand: 1 }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(n.into()))
    }

    /// `numer / denom` as a rational scalar. Panics on a zero denominator.
    pub fn ratio(numer: i64, denom: i64) -> Self {
        Self::from_rational(Rational::new(numer.into(), denom.into()))
    }

    /// `√D` itself.
    pub fn sqrt_of(radicand: u64) -> Result<Self> {
        Self::new(Rational::zero(), Rational::one(), radicand)
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.a)
    }

    /// Sign of the real number, decided exactly.
    pub fn sign(&self) -> i8 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // opposite signs: compare a² with b²·D
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * Rational::from_integer(self.radicand.into());
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    /// Galois conjugate `a − b·√D`.
    pub fn conjugate(&self) -> Self {
        Self { a: self.a.clone(), b: -&self.b, radicand: self.radicand }
    }

    /// Field norm `a² − b²·D`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * Rational::from_integer(self.radicand.into())
    }

    pub fn abs(&self) -> Self {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::normalized(&self.a * k, &self.b * k, self.radicand)
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&Rational::from_integer(k.into()))
    }

    pub fn recip(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        Some(Self::normalized(&self.a / &n, -&self.b / &n, self.radicand))
    }

    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        rhs.recip().map(|r| self * &r)
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        if self.b.is_zero() {
            return self.a.floor().to_integer();
        }
        // |b|·√D = √(b²D) lies in [t/s, (t+1)/s) with t = isqrt(r·s), b²D = r/s.
        let b2d = &self.b * &self.b * Rational::from_integer(self.radicand.into());
        let (r, s) = (b2d.numer().clone(), b2d.denom().clone());
        let t = (&r * &s).sqrt();
        let lo = if self.b.is_positive() {
            Rational::new(t, s)
        } else {
            -Rational::new(t + 1, s)
        };
        let mut n = (&self.a + lo).floor().to_integer();
        loop {
            let next = Self::from_rational(Rational::from_integer(&n + 1));
            if (self - &next).sign() >= 0 {
                n += 1;
            } else {
                break;
            }
        }
        n
    }

    /// Smallest integer not below the value.
    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.b.is_zero() {
            return a;
        }
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * (self.radicand as f64).sqrt()
    }

    /// Decimal rendering with `digits` significant digits, rounded to nearest.
    /// Informative only; the exact literal is authoritative.
    pub fn to_decimal(&self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.is_zero() {
            return format!("0.{}", "0".repeat(digits - 1));
        }
        let negative = self.sign() < 0;
        let v = self.abs();
        let pow10 = |e: i64| -> Rational {
            if e >= 0 {
                Rational::from_integer(num_traits::pow(BigInt::from(10), e as usize))
            } else {
                Rational::new(BigInt::one(), num_traits::pow(BigInt::from(10), (-e) as usize))
            }
        };
        let approx = v.to_f64();
        let mut e: i64 = if approx.is_finite() && approx > 0.0 { approx.log10().floor() as i64 } else { 0 };
        // settle 10^e <= v < 10^(e+1) exactly
        loop {
            if (&v - &Self::from_rational(pow10(e))).sign() < 0 {
                e -= 1;
            } else if (&v - &Self::from_rational(pow10(e + 1))).sign() >= 0 {
                e += 1;
            } else {
                break;
            }
        }
        let shift = digits as i64 - 1 - e;
        let scaled = v.scale(&pow10(shift)) + Self::from_rational(Rational::new(1.into(), 2.into()));
        let mut n = scaled.floor();
        if n >= num_traits::pow(BigInt::from(10), digits) {
            n = n.div_floor(&BigInt::from(10));
            e += 1;
        }
        let s = n.to_string();
        let body = if e >= 0 && (e as usize) < digits - 1 {
            let (int, frac) = s.split_at(e as usize + 1);
            format!("{int}.{frac}")
        } else if (-5..0).contains(&e) {
            format!("0.{}{}", "0".repeat((-e - 1) as usize), s)
        } else {
            let (lead, rest) = s.split_at(1);
            let rest = if rest.is_empty() { "0" } else { rest };
            format!("{lead}.{rest}e{e}")
        };
        if negative {
            format!("-{body}")
        } else {
            body
        }
    }
}

pub(crate) fn sign_of(r: &Rational) -> i8 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Sign of `x`, computed exactly.
pub fn quad_sign(x: &QuadScalar) -> i8 {
    x.sign()
}

impl From<Rational> for QuadScalar {
    fn from(r: Rational) -> Self {
        Self::from_rational(r)
    }
}

impl From<i64> for QuadScalar {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl PartialOrd for QuadScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).sign().cmp(&0)
    }
}

impl fmt::Display for QuadScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let op = if self.b.is_negative() { '-' } else { '+' };
        write!(f, "{}{}{}*sqrt({})", self.a, op, self.b.abs(), self.radicand)
    }
}

impl fmt::Debug for QuadScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Quad({self})")
    }
}

impl<'a> Add<&'a QuadScalar> for &'a QuadScalar {
    type Output = QuadScalar;
    fn add(self, rhs: &QuadScalar) -> QuadScalar {
        let d = join_radicand(self.radicand, rhs.radicand);
        QuadScalar::normalized(&self.a + &rhs.a, &self.b + &rhs.b, d)
    }
}

impl<'a> Sub<&'a QuadScalar> for &'a QuadScalar {
    type Output = QuadScalar;
    fn sub(self, rhs: &QuadScalar) -> QuadScalar {
        let d = join_radicand(self.radicand, rhs.radicand);
        QuadScalar::normalized(&self.a - &rhs.a, &self.b - &rhs.b, d)
    }
}

impl<'a> Mul<&'a QuadScalar> for &'a QuadScalar {
    type Output = QuadScalar;
    fn mul(self, rhs: &QuadScalar) -> QuadScalar {
        let d = join_radicand(self.radicand, rhs.radicand);
        let dr = Rational::from_integer(d.into());
        let a = &self.a * &rhs.a + &self.b * &rhs.b * dr;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        QuadScalar::normalized(a, b, d)
    }
}

impl Neg for &QuadScalar {
    type Output = QuadScalar;
    fn neg(self) -> QuadScalar {
        QuadScalar { a: -&self.a, b: -&self.b, radicand: self.radicand }
    }
}

impl Neg for QuadScalar {
    type Output = QuadScalar;
    fn neg(self) -> QuadScalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<QuadScalar> for QuadScalar {
            type Output = QuadScalar;
            fn $method(self, rhs: QuadScalar) -> QuadScalar {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a QuadScalar> for QuadScalar {
            type Output = QuadScalar;
            fn $method(self, rhs: &QuadScalar) -> QuadScalar {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<QuadScalar> for &'a QuadScalar {
            type Output = QuadScalar;
            fn $method(self, rhs: QuadScalar) -> QuadScalar {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&QuadScalar> for QuadScalar {
    fn add_assign(&mut self, rhs: &QuadScalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&QuadScalar> for QuadScalar {
    fn sub_assign(&mut self, rhs: &QuadScalar) {
        *self = &*self - rhs;
    }
}

impl std::iter::Sum for QuadScalar {
    fn sum<I: Iterator<Item = QuadScalar>>(iter: I) -> Self {
        iter.fold(QuadScalar::zero(), |acc, x| acc + x)
    }
}
