//! Exact scalars and exact integer/rational linear algebra.

mod linalg;
mod literal;
mod normal_form;
mod quad;

pub use linalg::{
    flatten_quad, is_integral, lcm_of_denominators, max_li_subset, quad_determinant, quad_inverse,
    rank_over_q, rat_vec_from_ints, solve_rational, RatVector, SpanBasis,
};
pub use literal::{parse_quad, parse_rational};
pub use normal_form::{
    hermite_normal_form, integer_combination, smith_divisors, submodule_multiplier, Hermite, IntMatrix,
};
pub use quad::{is_square_free, quad_sign, QuadScalar};

pub type Rational = num_rational::BigRational;

/// Smallest rational of the form `k / 2^bits` that is at least `√x`,
/// where `x` is a nonnegative quadratic scalar.
pub fn sqrt_upper(x: &QuadScalar, bits: u32) -> Rational {
    use num_bigint::BigInt;
    use num_traits::{One, Zero};
    assert!(x.sign() >= 0, "square root of a negative value");
    if x.is_zero() {
        return Rational::zero();
    }
    let scale = BigInt::one() << bits;
    // floor(√x · 2^bits) = isqrt(floor(x · 4^bits)) up to one unit; fix exactly below
    let scaled = x.scale(&Rational::from_integer(&scale * &scale));
    let mut k = num_integer::Roots::sqrt(&scaled.floor());
    loop {
        let cand = QuadScalar::from_rational(Rational::from_integer(k.clone()));
        if (&cand * &cand - &scaled).sign() >= 0 {
            break;
        }
        k += 1;
    }
    Rational::new(k, scale)
}
