//! Scalar abstractions.
//!
//! Numerical code (capacity, contours, quadrature, ODE stepping) is generic
//! over [`Real`], implemented for `f32` and `f64`. Exact code (determinants,
//! linear solves) is generic over [`ExactRing`], implemented for machine
//! integers, big integers, big rationals and integer polynomials.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, One, ToPrimitive, Zero};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + Sum + 'static
{
    /// Converts an `f64` literal, panicking only if the target cannot represent it at all.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    /// Nearest representable value of a big integer (saturates to ±inf).
    fn from_bigint(x: &BigInt) -> Self {
        match x.to_f64() {
            Some(v) => Self::lit(v),
            None if x.sign() == num_bigint::Sign::Minus => Self::neg_infinity(),
            None => Self::infinity(),
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand for `Complex<F>`.
pub type C<F> = Complex<F>;

/// An integral domain with exact division, the setting for fraction-free elimination.
pub trait ExactRing:
    Clone
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// `self / rhs` when `rhs` divides `self` exactly, otherwise `None`.
    fn exact_div(&self, rhs: &Self) -> Option<Self>;
}

impl ExactRing for BigInt {
    fn exact_div(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            return None;
        }
        let (q, r) = self.div_rem(rhs);
        r.is_zero().then_some(q)
    }
}

impl ExactRing for BigRational {
    fn exact_div(&self, rhs: &Self) -> Option<Self> {
        (!rhs.is_zero()).then(|| self / rhs)
    }
}

macro_rules! exact_ring_prim {
    ($($t:ty),*) => {$(
        impl ExactRing for $t {
            fn exact_div(&self, rhs: &Self) -> Option<Self> {
                if *rhs == 0 || self % rhs != 0 {
                    None
                } else {
                    Some(self / rhs)
                }
            }
        }
    )*};
}

exact_ring_prim!(i64, i128);
