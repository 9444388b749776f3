//! Dense polynomials with exact integer coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::decimal::DecInt;
use crate::scalar::{ExactRing, Real, C};

/// Univariate polynomial over the integers, `coeffs[k]` multiplies `x^k`.
///
/// Always stored trimmed: the last coefficient is nonzero, and the zero
/// polynomial has no coefficients (degree `None`).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^k`
    pub fn monomial(c: BigInt, k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.push(c);
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    /// Coefficient of `x^k`; zero past the degree.
    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        IntPoly { coeffs }
    }

    /// Keeps terms of degree `< n`.
    pub fn truncate(&self, n: usize) -> Self {
        Self::new(self.coeffs.iter().take(n).cloned().collect())
    }

    /// Gcd of the coefficients (nonnegative; zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive_part(&self) -> Self {
        let Some(lead) = self.leading() else {
            return Self::zero();
        };
        let mut g = self.content();
        if lead.is_negative() {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self` in `Z[x]`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let dd = d.degree()?;
        let dl = d.leading()?;
        let mut rem = self.coeffs.clone();
        if rem.is_empty() {
            return Some(Self::zero());
        }
        if rem.len() < d.coeffs.len() {
            return None;
        }
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let top = &rem[k + dd];
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(dl);
            if !r.is_zero() {
                return None;
            }
            for (i, c) in d.coeffs.iter().enumerate() {
                rem[k + i] -= &q * c;
            }
            quot[k] = q;
        }
        rem.iter().all(Zero::is_zero).then(|| Self::new(quot))
    }

    /// A nonzero integer multiple of the remainder of `self` by `d`.
    fn pseudo_rem(&self, d: &Self) -> Self {
        let dd = d.degree().expect("pseudo_rem by zero polynomial");
        let dl = d.leading().expect("nonzero divisor").clone();
        let mut r = self.clone();
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let rl = r.leading().expect("nonzero").clone();
            r = &r.scale(&dl) - &d.scale(&rl).shift(rd - dd);
        }
        r
    }

    /// Greatest common divisor over the rationals, returned primitive with positive
    /// leading coefficient. `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.primitive_part(), other.primitive_part());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive_part();
            a = b;
            b = r;
        }
        a
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Horner evaluation at a complex point.
    pub fn eval<F: Real>(&self, z: C<F>) -> C<F> {
        self.coeffs
            .iter()
            .rev()
            .fold(C::new(F::zero(), F::zero()), |acc, c| {
                acc * z + C::new(F::from_bigint(c), F::zero())
            })
    }

    /// Coefficients converted to complex floating point.
    pub fn to_complex<F: Real>(&self) -> Vec<C<F>> {
        self.coeffs
            .iter()
            .map(|c| C::new(F::from_bigint(c), F::zero()))
            .collect()
    }

    /// `Σ k·|c_k|`, an upper bound for `|p'|` on the unit circle.
    pub fn derivative_l1<F: Real>(&self) -> F {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| F::from_usize_lossy(k) * F::from_bigint(&c.abs()))
            .sum()
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigInt::from(k))
                .collect(),
        )
    }

    /// Renders with the given variable name, lowest degree first.
    pub fn display_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let show_mag = k == 0 || !mag.is_one();
            if show_mag {
                out.push_str(&mag.to_string());
            }
            match k {
                0 => {}
                1 => out.push_str(var),
                _ => out.push_str(&format!("{var}^{k}")),
            }
        }
        out
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({})", self.display_in("x"))
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("x"))
    }
}

impl Zero for IntPoly {
    fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for IntPoly {
    fn one() -> Self {
        IntPoly {
            coeffs: vec![BigInt::one()],
        }
    }
}

impl Add<&IntPoly> for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub<&IntPoly> for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul<&IntPoly> for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<IntPoly> for IntPoly {
            type Output = IntPoly;
            fn $m(self, rhs: IntPoly) -> IntPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        -&self
    }
}

impl ExactRing for IntPoly {
    fn exact_div(&self, rhs: &Self) -> Option<Self> {
        self.div_exact(rhs)
    }
}

impl Serialize for IntPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        strs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Vec<DecInt> = Vec::deserialize(d)?;
        Ok(IntPoly::new(v.into_iter().map(|x| x.0).collect()))
    }
}

/// Polynomial in two variables `z, w` over the integers.
///
/// `rows[a]` is the coefficient of `z^a`, itself a polynomial in `w`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct BiPoly {
    rows: Vec<IntPoly>,
}

impl BiPoly {
    pub fn new(mut rows: Vec<IntPoly>) -> Self {
        while rows.last().is_some_and(Zero::is_zero) {
            rows.pop();
        }
        BiPoly { rows }
    }

    /// Polynomial in `z` only.
    pub fn from_z(p: &IntPoly) -> Self {
        Self::new(p.coeffs().iter().cloned().map(IntPoly::constant).collect())
    }

    /// Polynomial in `w` only.
    pub fn from_w(p: &IntPoly) -> Self {
        Self::new(vec![p.clone()])
    }

    pub fn rows(&self) -> &[IntPoly] {
        &self.rows
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    /// Coefficient of `z^a w^b`.
    pub fn coeff(&self, a: usize, b: usize) -> BigInt {
        self.rows.get(a).map(|r| r.coeff(b)).unwrap_or_default()
    }

    pub fn z_degree(&self) -> Option<usize> {
        self.rows.len().checked_sub(1)
    }

    pub fn w_degree(&self) -> Option<usize> {
        self.rows.iter().filter_map(IntPoly::degree).max()
    }

    /// Coefficient of `w^b` as a polynomial in `z`.
    pub fn w_layer(&self, b: usize) -> IntPoly {
        IntPoly::new(self.rows.iter().map(|r| r.coeff(b)).collect())
    }

    /// Coefficient of `z^a` as a polynomial in `w`.
    pub fn z_layer(&self, a: usize) -> IntPoly {
        self.rows.get(a).cloned().unwrap_or_default()
    }

    /// Swaps the roles of `z` and `w`.
    pub fn transpose(&self) -> Self {
        let wd = match self.w_degree() {
            Some(d) => d,
            None => return Self::default(),
        };
        Self::new((0..=wd).map(|b| self.w_layer(b)).collect())
    }

    pub fn eval<F: Real>(&self, z: C<F>, w: C<F>) -> C<F> {
        self.rows
            .iter()
            .rev()
            .fold(C::new(F::zero(), F::zero()), |acc, r| acc * z + r.eval(w))
    }

    /// Specializes `z`, leaving complex coefficients of a polynomial in `w`.
    pub fn at_z<F: Real>(&self, z: C<F>) -> Vec<C<F>> {
        let n = self.w_degree().map_or(0, |d| d + 1);
        (0..n).map(|b| self.w_layer(b).eval(z)).collect()
    }
}
