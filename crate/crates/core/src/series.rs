//! Truncated integer power series in one and two variables, and reduced
//! rational functions with integer coefficients.
//!
//! Every series carries a hard truncation order. Reading past it is an
//! error rather than an implicit zero, because a silently zero-padded tail
//! turns a nonvanishing Hankel determinant into a vanishing one.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{BiPoly, IntPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("truncation too short: need {needed} coefficients, {available} materialized")]
    TruncationTooShort { needed: usize, available: usize },
    #[error("denominator constant term must be +1 or -1, got {0}")]
    NonUnitConstantTerm(BigInt),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("denominator vanishes at the origin after reduction")]
    PoleAtOrigin,
}

/// Univariate integer power series `Σ a_n z^n`, materialized through `truncation_order`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntSeries1D {
    #[serde(with = "crate::decimal::vec")]
    coeffs: Vec<BigInt>,
}

impl IntSeries1D {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        IntSeries1D { coeffs }
    }

    pub fn from_i64s(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| x.into()).collect())
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> BigInt) -> Self {
        Self::new((0..=order).map(f).collect())
    }

    /// Highest materialized index, `None` when nothing is materialized.
    pub fn truncation_order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Result<&BigInt, SeriesError> {
        self.coeffs.get(n).ok_or(SeriesError::TruncationTooShort {
            needed: n + 1,
            available: self.coeffs.len(),
        })
    }

    /// Fails unless indices `0..=n` are materialized.
    pub fn require(&self, n: usize) -> Result<(), SeriesError> {
        self.coeff(n).map(|_| ())
    }

    /// Coefficients `a_0..=a_n`.
    pub fn prefix(&self, n: usize) -> Result<&[BigInt], SeriesError> {
        self.require(n)?;
        Ok(&self.coeffs[..=n])
    }

    pub fn truncated(&self, n: usize) -> Result<IntSeries1D, SeriesError> {
        Ok(IntSeries1D::new(self.prefix(n)?.to_vec()))
    }
}

/// Bivariate integer power series `Σ a_{jk} z^j w^k`, materialized on the
/// triangle `j + k ≤ truncation_order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiSeries {
    /// `rows[j][k] = a_{jk}`, `rows[j].len() == order + 1 - j`.
    rows: Vec<Vec<BigInt>>,
    order: usize,
    /// Free-text assertion about the convergence domain. Never read by any computation.
    pub convergence_note: Option<String>,
}

impl BiSeries {
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let rows = (0..=order)
            .map(|j| (0..=order - j).map(|k| f(j, k)).collect())
            .collect();
        BiSeries {
            rows,
            order,
            convergence_note: None,
        }
    }

    /// Builds from ragged rows `rows[j][k]`, keeping the largest full triangle.
    /// Returns `None` when not even `a_00` is present.
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Option<Self> {
        if rows.first().is_none_or(|r| r.is_empty()) {
            return None;
        }
        // row j reaches total degree j + len - 1
        let order = rows
            .iter()
            .enumerate()
            .map(|(j, r)| (j + r.len()).saturating_sub(1))
            .fold(rows.len() - 1, usize::min);
        Some(Self::from_fn(order, |j, k| rows[j][k].clone()))
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.convergence_note = Some(note.into());
        self
    }

    pub fn truncation_order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, j: usize, k: usize) -> Result<&BigInt, SeriesError> {
        self.rows
            .get(j)
            .and_then(|r| r.get(k))
            .ok_or(SeriesError::TruncationTooShort {
                needed: j + k + 1,
                available: self.order + 1,
            })
    }

    /// Fails unless every `(j, k)` with `j + k ≤ n` is materialized.
    pub fn require(&self, n: usize) -> Result<(), SeriesError> {
        if n > self.order {
            return Err(SeriesError::TruncationTooShort {
                needed: n + 1,
                available: self.order + 1,
            });
        }
        Ok(())
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }
}

/// Reduced quotient `P/Q` of integer polynomials with `Q(0) > 0`.
///
/// The pair is coprime over the rationals and has no common integer
/// content, so `Q(0) = 1` whenever the constant term is a unit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalFn {
    numerator: IntPoly,
    denominator: IntPoly,
}

impl RationalFn {
    pub fn new(numerator: IntPoly, denominator: IntPoly) -> Result<Self, SeriesError> {
        if denominator.is_zero() {
            return Err(SeriesError::ZeroDenominator);
        }
        if numerator.is_zero() {
            return Ok(RationalFn {
                numerator,
                denominator: IntPoly::one(),
            });
        }
        let g = numerator.gcd(&denominator);
        let mut p = numerator.div_exact(&g).expect("gcd divides numerator");
        let mut q = denominator.div_exact(&g).expect("gcd divides denominator");
        let c = p.content().gcd(&q.content());
        if !c.is_one() {
            p = IntPoly::new(p.coeffs().iter().map(|x| x / &c).collect());
            q = IntPoly::new(q.coeffs().iter().map(|x| x / &c).collect());
        }
        let q0 = q.coeff(0);
        if q0.is_zero() {
            return Err(SeriesError::PoleAtOrigin);
        }
        if q0.is_negative() {
            p = -p;
            q = -q;
        }
        Ok(RationalFn {
            numerator: p,
            denominator: q,
        })
    }

    pub fn from_i64s(p: &[i64], q: &[i64]) -> Result<Self, SeriesError> {
        Self::new(IntPoly::from_i64s(p), IntPoly::from_i64s(q))
    }

    pub fn numerator(&self) -> &IntPoly {
        &self.numerator
    }

    pub fn denominator(&self) -> &IntPoly {
        &self.denominator
    }
}

/// Taylor coefficients `a_0..=a_order` of `P/Q`, computed by exact long division.
///
/// Requires `|Q(0)| = 1` so that every coefficient is an integer.
pub fn expand_rational(r: &RationalFn, order: usize) -> Result<IntSeries1D, SeriesError> {
    let q = r.denominator();
    let q0 = q.coeff(0);
    if !q0.abs().is_one() {
        return Err(SeriesError::NonUnitConstantTerm(q0));
    }
    let qc = q.coeffs();
    let mut a: Vec<BigInt> = Vec::with_capacity(order + 1);
    for n in 0..=order {
        let mut acc = r.numerator().coeff(n);
        for (i, qi) in qc.iter().enumerate().skip(1).take(n) {
            acc -= qi * &a[n - i];
        }
        a.push(acc * &q0);
    }
    Ok(IntSeries1D::new(a))
}

/// Exponent sequences for lacunary fixtures; `coeff(n)` counts the indices
/// `j ≥ 0` whose exponent equals `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExponentRule {
    /// `j ↦ j²`
    Squares,
    /// `j ↦ j!`
    Factorials,
    /// No exponents: the zero series.
    Empty,
    /// An explicit finite exponent list (repeats count with multiplicity).
    Exponents(Vec<u64>),
}

impl ExponentRule {
    fn exponents_upto(&self, order: u64) -> Vec<u64> {
        match self {
            ExponentRule::Empty => Vec::new(),
            ExponentRule::Exponents(v) => v.iter().copied().filter(|&e| e <= order).collect(),
            ExponentRule::Squares => (0u64..)
                .map(|j| j.checked_mul(j))
                .take_while(|e| e.is_some_and(|e| e <= order))
                .flatten()
                .collect(),
            ExponentRule::Factorials => {
                let mut out = Vec::new();
                let mut fact: u64 = 1;
                let mut j: u64 = 0;
                while fact <= order {
                    out.push(fact);
                    j += 1;
                    match fact.checked_mul(j.max(1)) {
                        Some(f) => fact = f,
                        None => break,
                    }
                }
                out
            }
        }
    }
}

/// Indicator-count series of an exponent rule, materialized through `order`.
pub fn lacunary_series(rule: &ExponentRule, order: usize) -> IntSeries1D {
    let mut a = vec![BigInt::zero(); order + 1];
    for e in rule.exponents_upto(order as u64) {
        a[e as usize] += 1;
    }
    IntSeries1D::new(a)
}

/// `g(z)·h(w)` on the triangle `j + k ≤ order`.
pub fn biseries_from_product(
    g: &IntSeries1D,
    h: &IntSeries1D,
    order: usize,
) -> Result<BiSeries, SeriesError> {
    g.require(order)?;
    h.require(order)?;
    Ok(BiSeries::from_fn(order, |j, k| {
        &g.coeffs()[j] * &h.coeffs()[k]
    }))
}

/// Taylor coefficients of `P(z,w)/Q(z,w)` with `Q(0,0) = ±1`.
pub fn expand_birational(
    num: &BiPoly,
    den: &BiPoly,
    order: usize,
) -> Result<BiSeries, SeriesError> {
    if den.is_zero() {
        return Err(SeriesError::ZeroDenominator);
    }
    let q00 = den.coeff(0, 0);
    if !q00.abs().is_one() {
        return Err(SeriesError::NonUnitConstantTerm(q00));
    }
    let qz = den.z_degree().unwrap_or(0);
    let qw = den.w_degree().unwrap_or(0);
    let mut rows: Vec<Vec<BigInt>> = (0..=order).map(|j| Vec::with_capacity(order + 1 - j)).collect();
    for total in 0..=order {
        for j in 0..=total {
            let k = total - j;
            let mut acc = num.coeff(j, k);
            for a in 0..=j.min(qz) {
                for b in 0..=k.min(qw) {
                    if a == 0 && b == 0 {
                        continue;
                    }
                    let c = den.coeff(a, b);
                    if !c.is_zero() {
                        acc -= c * &rows[j - a][k - b];
                    }
                }
            }
            rows[j].push(acc * &q00);
        }
    }
    Ok(BiSeries::from_fn(order, |j, k| rows[j][k].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| x.into()).collect()
    }

    #[test]
    fn expand_examples() {
        let geo = RationalFn::from_i64s(&[1], &[1, -1]).unwrap();
        assert_eq!(expand_rational(&geo, 4).unwrap().coeffs(), ints(&[1, 1, 1, 1, 1]));
        let sq = RationalFn::from_i64s(&[1], &[1, -2, 1]).unwrap();
        assert_eq!(expand_rational(&sq, 4).unwrap().coeffs(), ints(&[1, 2, 3, 4, 5]));
    }

    #[test]
    fn expand_fibonacci_against_recurrence() {
        let fib = RationalFn::from_i64s(&[1], &[1, -1, -1]).unwrap();
        let got = expand_rational(&fib, 6).unwrap();
        let mut oracle = vec![1i64, 1];
        while oracle.len() < 7 {
            let n = oracle.len();
            oracle.push(oracle[n - 1] + oracle[n - 2]);
        }
        assert_eq!(got.coeffs(), ints(&oracle));
        assert_eq!(got.coeffs(), ints(&[1, 1, 2, 3, 5, 8, 13]));
    }

    #[test]
    fn expand_errors() {
        let r = RationalFn::from_i64s(&[1], &[2, -1]).unwrap();
        assert_eq!(
            expand_rational(&r, 3),
            Err(SeriesError::NonUnitConstantTerm(2.into()))
        );
        assert_eq!(
            RationalFn::from_i64s(&[1], &[0]),
            Err(SeriesError::ZeroDenominator)
        );
        assert_eq!(
            RationalFn::from_i64s(&[1], &[0, 1]),
            Err(SeriesError::PoleAtOrigin)
        );
    }

    #[test]
    fn canonical_form() {
        // (2 - 2z^2) / (-2 + 2z) = -(1 + z)
        let r = RationalFn::from_i64s(&[2, 0, -2], &[-2, 2]).unwrap();
        assert_eq!(r.numerator(), &IntPoly::from_i64s(&[-1, -1]));
        assert_eq!(r.denominator(), &IntPoly::from_i64s(&[1]));
        // -1 / (-1 + z) = 1 / (1 - z)
        let r = RationalFn::from_i64s(&[-1], &[-1, 1]).unwrap();
        assert_eq!(r.denominator(), &IntPoly::from_i64s(&[1, -1]));
        let z = RationalFn::from_i64s(&[0], &[3, 1]).unwrap();
        assert_eq!(z.denominator(), &IntPoly::one());
    }

    #[test]
    fn lacunary_examples() {
        assert_eq!(
            lacunary_series(&ExponentRule::Squares, 5).coeffs(),
            ints(&[1, 1, 0, 0, 1, 0])
        );
        assert_eq!(
            lacunary_series(&ExponentRule::Factorials, 6).coeffs(),
            ints(&[0, 2, 1, 0, 0, 0, 1])
        );
        assert_eq!(lacunary_series(&ExponentRule::Empty, 3).coeffs(), ints(&[0, 0, 0, 0]));
        assert_eq!(
            lacunary_series(&ExponentRule::Exponents(vec![2, 2, 9]), 3).coeffs(),
            ints(&[0, 0, 2, 0])
        );
    }

    #[test]
    fn factorial_rule_enumeration_oracle() {
        // direct enumeration of j! <= 130
        let order = 130;
        let mut oracle = vec![0i64; order + 1];
        let mut f = 1u64;
        for j in 0..10u64 {
            if j > 0 {
                f *= j;
            }
            if f as usize <= order {
                oracle[f as usize] += 1;
            }
        }
        assert_eq!(lacunary_series(&ExponentRule::Factorials, order).coeffs(), ints(&oracle));
    }

    #[test]
    fn product_examples() {
        let ones = IntSeries1D::from_i64s(&[1; 4]);
        let b = biseries_from_product(&ones, &ones, 3).unwrap();
        for j in 0..=3 {
            for k in 0..=3 - j {
                assert_eq!(b.coeff(j, k).unwrap(), &BigInt::one());
            }
        }
        let fact = lacunary_series(&ExponentRule::Factorials, 3);
        let b = biseries_from_product(&ones, &fact, 3).unwrap();
        for j in 0..=2 {
            assert_eq!(b.coeff(j, 1).unwrap(), &BigInt::from(2));
            assert_eq!(b.coeff(j, 0).unwrap(), &BigInt::zero());
        }
        assert_eq!(b.coeff(0, 3).unwrap(), &BigInt::zero());
        assert_eq!(b.coeff(1, 2).unwrap(), &BigInt::one());
        let one = IntSeries1D::from_i64s(&[1]);
        let b = biseries_from_product(&one, &one, 0).unwrap();
        assert_eq!(b.coeff(0, 0).unwrap(), &BigInt::one());
        assert!(b.coeff(1, 0).is_err());
        assert!(matches!(
            biseries_from_product(&one, &ones, 2),
            Err(SeriesError::TruncationTooShort { .. })
        ));
    }

    #[test]
    fn truncation_is_an_error() {
        let s = IntSeries1D::from_i64s(&[1, 2]);
        assert_eq!(
            s.coeff(2),
            Err(SeriesError::TruncationTooShort { needed: 3, available: 2 })
        );
    }

    #[test]
    fn birational_binomials() {
        // 1/(1 - z - w) has a_{jk} = C(j+k, j)
        let den = BiPoly::new(vec![IntPoly::from_i64s(&[1, -1]), IntPoly::from_i64s(&[-1])]);
        let b = expand_birational(&BiPoly::from_w(&IntPoly::one()), &den, 8).unwrap();
        assert_eq!(b.coeff(3, 2).unwrap(), &BigInt::from(10));
        assert_eq!(b.coeff(4, 4).unwrap(), &BigInt::from(70));
    }

    #[test]
    fn from_rows_keeps_full_triangle() {
        let rows = vec![ints(&[1, 1, 1]), ints(&[1, 1, 1]), ints(&[1])];
        let b = BiSeries::from_rows(rows).unwrap();
        assert_eq!(b.truncation_order(), 2);
        let rows = vec![ints(&[1, 1, 1]), ints(&[1])];
        assert_eq!(BiSeries::from_rows(rows).unwrap().truncation_order(), 1);
        assert!(BiSeries::from_rows(vec![vec![]]).is_none());
    }
}
