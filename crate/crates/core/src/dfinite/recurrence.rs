//! Linear ODEs with polynomial coefficients to P-recursive recurrences, and
//! exact coefficient generation from them.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::DFiniteError;
use crate::poly::IntPoly;
use crate::series::IntSeries1D;

/// `Σ_{t=offset}^{offset+order} c_t(N) · a_{N+t} = 0` for every `N ≥ 0`,
/// with `a_j = 0` for `j < 0`. `coeffs[k]` is `c_{offset+k}` as a polynomial in `N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Recurrence {
    offset: isize,
    coeffs: Vec<IntPoly>,
}

impl Recurrence {
    /// Trims zero polynomials at both ends; `None` if nothing is left.
    pub fn new(offset: isize, mut coeffs: Vec<IntPoly>) -> Option<Self> {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        let lead_zeros = coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead_zeros == coeffs.len() {
            return None;
        }
        coeffs.drain(..lead_zeros);
        Some(Recurrence {
            offset: offset + lead_zeros as isize,
            coeffs,
        })
    }

    pub fn offset(&self) -> isize {
        self.offset
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Shift of the leading term, `offset + order`.
    pub fn leading_shift(&self) -> isize {
        self.offset + self.order() as isize
    }

    pub fn coeffs(&self) -> &[IntPoly] {
        &self.coeffs
    }

    /// `c_t` for shift `t`, zero outside the support.
    pub fn coeff_at_shift(&self, t: isize) -> Option<&IntPoly> {
        let k = t - self.offset;
        (k >= 0).then(|| self.coeffs.get(k as usize)).flatten()
    }

    pub fn leading(&self) -> &IntPoly {
        self.coeffs.last().expect("nonempty")
    }

    /// `(shift, c_t(N))` for every nonzero term at a given `N`.
    pub fn terms_at(&self, n: isize) -> impl Iterator<Item = (isize, BigInt)> + '_ {
        let nb = BigInt::from(n);
        self.coeffs.iter().enumerate().filter_map(move |(k, c)| {
            let v = c.eval_int(&nb);
            (!v.is_zero()).then_some((self.offset + k as isize, v))
        })
    }

    /// Residual of equation `N` against a coefficient list (missing entries count as 0).
    pub fn residual(&self, a: &[BigRational], n: isize) -> BigRational {
        self.terms_at(n)
            .filter_map(|(t, c)| {
                let j = n + t;
                (j >= 0).then(|| a.get(j as usize)).flatten().map(|x| x * BigRational::from_integer(c))
            })
            .sum()
    }
}

/// Falling factorial `(x)(x-1)…(x-i+1)` as a polynomial in `N`, for `x = N + t`.
fn falling_factorial(t: isize, i: usize) -> IntPoly {
    (0..i).fold(IntPoly::one(), |acc, k| {
        let lin = IntPoly::new(vec![BigInt::from(t - k as isize), BigInt::one()]);
        &acc * &lin
    })
}

/// Terms of the recurrence for `Σ_i p_i(z) f^{(i)}(z)`: the coefficient of
/// `z^N` is `Σ_{i,a} p_{i,a} · (N+i-a)_i · a_{N+i-a}`. Empty if every `p_i` is zero.
pub(crate) fn ode_terms(p: &[IntPoly]) -> Option<Recurrence> {
    let mut lo = isize::MAX;
    let mut hi = isize::MIN;
    for (i, pi) in p.iter().enumerate() {
        for (a, c) in pi.coeffs().iter().enumerate() {
            if !c.is_zero() {
                let t = i as isize - a as isize;
                lo = lo.min(t);
                hi = hi.max(t);
            }
        }
    }
    if lo > hi {
        return None;
    }
    let mut coeffs = vec![IntPoly::zero(); (hi - lo + 1) as usize];
    for (i, pi) in p.iter().enumerate() {
        for (a, c) in pi.coeffs().iter().enumerate() {
            if !c.is_zero() {
                let t = i as isize - a as isize;
                let slot = &mut coeffs[(t - lo) as usize];
                *slot = &*slot + &falling_factorial(t, i).scale(c);
            }
        }
    }
    Recurrence::new(lo, coeffs)
}

/// Compiles `p_0 f + p_1 f' + … + p_r f^{(r)} = 0` into a recurrence on the Taylor coefficients.
pub fn recurrence_from_ode(p: &[IntPoly]) -> Result<Recurrence, DFiniteError> {
    ode_terms(p).ok_or(DFiniteError::DegenerateEquation)
}

/// Exact coefficients produced by a recurrence, with the integrality check recorded.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RationalSeries {
    #[serde(serialize_with = "ser_rats")]
    pub coeffs: Vec<BigRational>,
    /// First index whose value is not an integer.
    pub first_non_integer: Option<usize>,
}

fn ser_rats<S: serde::Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

impl RationalSeries {
    fn new(coeffs: Vec<BigRational>) -> Self {
        let first_non_integer = coeffs.iter().position(|x| !x.is_integer());
        RationalSeries {
            coeffs,
            first_non_integer,
        }
    }

    pub fn to_int_series(&self) -> Result<IntSeries1D, DFiniteError> {
        if let Some(j) = self.first_non_integer {
            return Err(DFiniteError::NonIntegerCoefficient { j, k: 0 });
        }
        Ok(IntSeries1D::new(self.coeffs.iter().map(|x| x.to_integer()).collect()))
    }
}

/// Resolves one entry from its equation `lead·x + rest = 0` and an optional given value.
pub(crate) fn resolve(
    lead: &BigInt,
    rest: BigRational,
    given: Option<&BigRational>,
    j: usize,
    k: usize,
) -> Result<BigRational, DFiniteError> {
    if lead.is_zero() {
        if !rest.is_zero() {
            return Err(DFiniteError::InconsistentSystem { j, k });
        }
        return given.cloned().ok_or(DFiniteError::SingularIndex { j, k });
    }
    let v = -rest / BigRational::from_integer(lead.clone());
    match given {
        Some(g) if *g != v => Err(DFiniteError::InconsistentInitials { j, k }),
        _ => Ok(v),
    }
}

/// `a_0 ..= a_order` from the recurrence. `initials[j]` gives `a_j`; indices
/// below the leading shift must be covered, later ones are checked against
/// the recurrence or used where its leading coefficient vanishes.
pub fn generate_coeffs(
    rec: &Recurrence,
    initials: &[BigRational],
    order: usize,
) -> Result<RationalSeries, DFiniteError> {
    let hi = rec.leading_shift();
    let mut a: Vec<BigRational> = Vec::with_capacity(order + 1);
    for j in 0..=order {
        let given = initials.get(j);
        if (j as isize) < hi {
            let v = given.cloned().ok_or(DFiniteError::MissingInitial { j, k: 0 })?;
            a.push(v);
            continue;
        }
        let n = j as isize - hi;
        let lead = rec.leading().eval_int(&BigInt::from(n));
        let rest: BigRational = rec
            .terms_at(n)
            .filter(|&(t, _)| t != hi)
            .filter_map(|(t, c)| {
                let idx = n + t;
                (idx >= 0).then(|| &a[idx as usize] * BigRational::from_integer(c))
            })
            .sum();
        a.push(resolve(&lead, rest, given, j, 0)?);
    }
    Ok(RationalSeries::new(a))
}
