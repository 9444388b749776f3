//! Kronecker's rationality criterion for univariate series: a series is
//! rational exactly when its Hankel determinants `A_n = det(a_{i+j})_{0..=n}`
//! vanish for all large `n`. Also exact Padé-style reconstruction of `P/Q`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{bareiss_det, solve_rational};
use crate::poly::IntPoly;
use crate::series::{IntSeries1D, RationalFn, SeriesError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HankelError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("empty or reversed window [{lo}, {hi}]")]
    InvalidWindow { lo: usize, hi: usize },
    #[error("no rational function with numerator and denominator degree <= {0} fits the series")]
    NoRationalFit(usize),
}

/// Outcome of a finite-window Kronecker test. Never a proof: the window is finite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HankelVerdict {
    /// Every determinant in the window vanishes.
    RationalEvidence,
    /// Largest `n` in the window with `A_n != 0`, when that nonzero value sits
    /// within the last three entries.
    NotRationalWitness(usize),
    /// Some `A_n != 0` early in the window, followed by at least three zeros.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HankelReport {
    pub window: (usize, usize),
    #[serde(with = "crate::decimal::vec")]
    pub dets: Vec<BigInt>,
    pub verdict: HankelVerdict,
}

/// Trailing zeros needed before a nonzero prefix is called inconclusive
/// rather than a non-rationality witness.
pub const TERMINAL_RUN: usize = 3;

/// The `(n+1)×(n+1)` Hankel matrix `(a_{i+j})`.
pub fn hankel_matrix(a: &IntSeries1D, n: usize) -> Result<Vec<Vec<BigInt>>, SeriesError> {
    let c = a.prefix(2 * n)?;
    Ok((0..=n).map(|i| c[i..=i + n].to_vec()).collect())
}

pub fn hankel_det(a: &IntSeries1D, n: usize) -> Result<BigInt, HankelError> {
    Ok(bareiss_det(hankel_matrix(a, n)?))
}

/// Default window: `[1, 2·hint + 4]` with a degree hint, else `[1, 12]`.
pub fn default_window(degree_hint: Option<usize>) -> (usize, usize) {
    (1, degree_hint.map_or(12, |d| 2 * d + 4))
}

pub fn kronecker_test(a: &IntSeries1D, lo: usize, hi: usize) -> Result<HankelReport, HankelError> {
    if lo > hi {
        return Err(HankelError::InvalidWindow { lo, hi });
    }
    a.require(2 * hi)?;
    let dets: Vec<BigInt> = (lo..=hi)
        .into_par_iter()
        .map(|n| hankel_det(a, n))
        .collect::<Result<_, _>>()?;
    let verdict = classify(&dets, lo);
    Ok(HankelReport {
        window: (lo, hi),
        dets,
        verdict,
    })
}

fn classify(dets: &[BigInt], lo: usize) -> HankelVerdict {
    match dets.iter().rposition(|d| !d.is_zero()) {
        None => HankelVerdict::RationalEvidence,
        Some(i) if dets.len() - 1 - i >= TERMINAL_RUN => HankelVerdict::Inconclusive,
        Some(i) => HankelVerdict::NotRationalWitness(lo + i),
    }
}

/// Finds `P/Q` with `deg P, deg Q ≤ d` whose expansion agrees with `a`
/// through index `2d + 1`, returned in reduced canonical form.
///
/// The denominator comes from the Toeplitz system
/// `Σ_{i=1..d} q_i a_{n-i} = -a_n` for `n = d+1 ..= 2d+1`, solved exactly
/// over the rationals with `q_0 = 1`.
pub fn reconstruct_rational(a: &IntSeries1D, d: usize) -> Result<RationalFn, HankelError> {
    let top = 2 * d + 1;
    let c: Vec<BigRational> = a
        .prefix(top)?
        .iter()
        .map(|x| BigRational::from_integer(x.clone()))
        .collect();
    let rows: Vec<Vec<BigRational>> = (d + 1..=top)
        .map(|n| (1..=d).map(|i| c[n - i].clone()).collect())
        .collect();
    let rhs: Vec<BigRational> = (d + 1..=top).map(|n| -c[n].clone()).collect();
    let tail = solve_rational(&rows, &rhs).ok_or(HankelError::NoRationalFit(d))?;
    let mut q = vec![BigRational::one()];
    q.extend(tail);
    let p: Vec<BigRational> = (0..=d)
        .map(|n| (0..=n).map(|i| &q[i] * &c[n - i]).sum())
        .collect();

    let lcm = q
        .iter()
        .chain(&p)
        .fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let to_int = |v: &[BigRational]| {
        IntPoly::new(v.iter().map(|x| (x * &lcm).to_integer()).collect())
    };
    let r = RationalFn::new(to_int(&p), to_int(&q))?;
    if expand_exact(&r, top) != c {
        return Err(HankelError::NoRationalFit(d));
    }
    Ok(r)
}

/// Coefficients `0..=order` of `P/Q` over the rationals (no unit-constant-term requirement).
pub fn expand_exact(r: &RationalFn, order: usize) -> Vec<BigRational> {
    let q: Vec<BigRational> = r
        .denominator()
        .coeffs()
        .iter()
        .map(|x| BigRational::from_integer(x.clone()))
        .collect();
    let mut out: Vec<BigRational> = Vec::with_capacity(order + 1);
    for n in 0..=order {
        let mut acc = BigRational::from_integer(r.numerator().coeff(n));
        for (i, qi) in q.iter().enumerate().skip(1).take(n) {
            acc -= qi * &out[n - i];
        }
        out.push(acc / &q[0]);
    }
    out
}
