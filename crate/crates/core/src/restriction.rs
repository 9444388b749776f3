//! Diagonal restrictions of bivariate integer series.
//!
//! For a bivariate series `f = Σ a_{jk} z^j w^k` and an exponent `n ≥ 1`,
//! the weighted-homogeneous pieces `P_v(z, w) = Σ_{j+nk=v} a_{jk} z^j w^k`
//! give the slice `g_θ(z) = f(z, e^{iθ} z^n) = Σ_v P_v(1, e^{iθ}) z^v`.
//! The Hankel determinant `H_m(w) = det(P_{i+j}(1, w))_{0..=m}` is a
//! polynomial in `w` with integer coefficients; once `sup_{|w|=1} |H_m| < 1`
//! it must be the zero polynomial, and then every slice is rational by
//! Kronecker's criterion.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::hankel::TERMINAL_RUN;
use crate::linalg::bareiss_det;
use crate::poly::IntPoly;
use crate::scalar::{Real, C};
use crate::series::{BiSeries, IntSeries1D, SeriesError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RestrictionError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("diagonal exponent must be positive")]
    InvalidExponent,
    #[error("empty or reversed Hankel size range [{lo}, {hi}]")]
    InvalidRange { lo: usize, hi: usize },
    #[error("sup bound {sup} < 1 but the polynomial {poly} is nonzero")]
    InconsistentCertificate { sup: f64, poly: String },
}

/// `pv[v] = P_v(1, w)` for `v = 0..=order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictionFamily {
    n: usize,
    pv: Vec<IntPoly>,
}

impl RestrictionFamily {
    pub fn exponent(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.pv.len() - 1
    }

    pub fn polys(&self) -> &[IntPoly] {
        &self.pv
    }

    fn require(&self, v: usize) -> Result<(), SeriesError> {
        if v >= self.pv.len() {
            return Err(SeriesError::TruncationTooShort {
                needed: v + 1,
                available: self.pv.len(),
            });
        }
        Ok(())
    }

    /// Exact coefficients of the slice `g_0(z) = f(z, z^n)`, i.e. `P_v(1, 1)`.
    pub fn slice_at_one(&self) -> IntSeries1D {
        IntSeries1D::new(
            self.pv
                .iter()
                .map(|p| p.coeffs().iter().sum::<BigInt>())
                .collect(),
        )
    }
}

pub fn restriction_polys(
    f: &BiSeries,
    n: usize,
    order: usize,
) -> Result<RestrictionFamily, RestrictionError> {
    if n == 0 {
        return Err(RestrictionError::InvalidExponent);
    }
    f.require(order)?;
    let pv = (0..=order)
        .map(|v| {
            (0..=v / n)
                .map(|k| f.coeff(v - n * k, k).cloned())
                .collect::<Result<Vec<_>, _>>()
                .map(IntPoly::new)
        })
        .collect::<Result<_, _>>()?;
    Ok(RestrictionFamily { n, pv })
}

/// `H_m(w) = det(P_{i+j}(1, w))_{i,j=0..=m}`, computed fraction-free in `Z[w]`.
pub fn hankel_poly(fam: &RestrictionFamily, m: usize) -> Result<IntPoly, RestrictionError> {
    fam.require(2 * m)?;
    let mat = (0..=m)
        .map(|i| fam.pv[i..=i + m].to_vec())
        .collect::<Vec<_>>();
    Ok(bareiss_det(mat))
}

/// Upper bound for `max_{|w|=1} |p(w)|`.
///
/// Evaluates on `G = max(64, 8·deg p)` equally spaced points and adds the
/// Lipschitz correction `(π/G)·Σ k|c_k|`: every point of the circle lies
/// within arc length `π/G` of a grid point and `|p'| ≤ Σ k|c_k|` there.
pub fn coeff_sup_bound<F: Real>(p: &IntPoly) -> F {
    if p.is_zero() {
        return F::zero();
    }
    let grid = 64usize.max(8 * p.degree().unwrap_or(0));
    let g = F::from_usize_lossy(grid);
    let step = F::TAU() / g;
    let max_on_grid = (0..grid)
        .map(|i| {
            let t = step * F::from_usize_lossy(i);
            p.eval(C::from_polar(F::one(), t)).norm()
        })
        .fold(F::zero(), F::max);
    max_on_grid + F::PI() / g * p.derivative_l1::<F>()
}

/// Maximum-principle step: an integer polynomial bounded by `sup_bound < 1`
/// on the unit circle has every coefficient of modulus `< 1`, so it is zero.
///
/// Returns `Ok(true)` for the zero polynomial regardless of the bound,
/// `Ok(false)` when the bound is too weak to conclude, and an error if a
/// bound below one is paired with a nonzero polynomial.
pub fn conclude_zero<F: Real>(p: &IntPoly, sup_bound: F) -> Result<bool, RestrictionError> {
    if p.is_zero() {
        return Ok(true);
    }
    if sup_bound < F::one() {
        return Err(RestrictionError::InconsistentCertificate {
            sup: sup_bound.to_f64().unwrap_or(f64::NAN),
            poly: p.display_in("w"),
        });
    }
    Ok(false)
}

/// Floating-point slice coefficients `P_v(1, e^{iθ})` for `v = 0..=order`.
pub fn slice_coeffs<F: Real>(
    fam: &RestrictionFamily,
    theta: F,
    order: usize,
) -> Result<Vec<C<F>>, RestrictionError> {
    fam.require(order)?;
    let w = C::from_polar(F::one(), theta);
    Ok(fam.pv[..=order].iter().map(|p| p.eval(w)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    RationalEvidence,
    NotRationalEvidence,
    Inconclusive,
}

/// First nonzero coefficient of a nonvanishing `H_m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub degree: usize,
    #[serde(with = "crate::decimal::single")]
    pub coeff: BigInt,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HankelPolyResult {
    pub m: usize,
    pub vanishes: bool,
    pub witness: Option<Witness>,
    /// Certified bound on `max_{|w|=1} |H_m(w)|`.
    pub sup_bound: f64,
    /// Whether the maximum-principle step alone concludes `H_m ≡ 0`.
    pub max_principle_zero: bool,
    pub poly: IntPoly,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionReport {
    pub n: usize,
    pub m_range: (usize, usize),
    pub results: Vec<HankelPolyResult>,
    pub verdict: Verdict,
    /// Smallest `m` in the range with `H_m ≡ 0`.
    pub first_vanishing_m: Option<usize>,
    /// Smallest `m` starting the terminal run of vanishing `H_m`.
    pub terminal_onset_m: Option<usize>,
}

/// Runs `H_m` for every `m` in `[m_lo, m_hi]`.
///
/// `RationalEvidence` needs `H_m ≡ 0` on a terminal run of at least three
/// sizes; `NotRationalEvidence` means `H_{m_hi}` itself is nonzero.
pub fn criterion_test(
    f: &BiSeries,
    n: usize,
    m_lo: usize,
    m_hi: usize,
) -> Result<CriterionReport, RestrictionError> {
    if m_lo > m_hi {
        return Err(RestrictionError::InvalidRange { lo: m_lo, hi: m_hi });
    }
    let fam = restriction_polys(f, n, 2 * m_hi)?;
    let results = (m_lo..=m_hi)
        .into_par_iter()
        .map(|m| {
            let poly = hankel_poly(&fam, m)?;
            let sup: f64 = coeff_sup_bound(&poly);
            let max_principle_zero = conclude_zero(&poly, sup)? && sup < 1.0;
            let witness = poly
                .coeffs()
                .iter()
                .enumerate()
                .find(|(_, c)| !c.is_zero())
                .map(|(degree, c)| Witness {
                    degree,
                    coeff: c.clone(),
                });
            Ok(HankelPolyResult {
                m,
                vanishes: poly.is_zero(),
                witness,
                sup_bound: sup,
                max_principle_zero,
                poly,
            })
        })
        .collect::<Result<Vec<_>, RestrictionError>>()?;

    let trailing = results.iter().rev().take_while(|r| r.vanishes).count();
    let verdict = if trailing >= TERMINAL_RUN {
        Verdict::RationalEvidence
    } else if trailing == 0 {
        Verdict::NotRationalEvidence
    } else {
        Verdict::Inconclusive
    };
    let first_vanishing_m = results.iter().find(|r| r.vanishes).map(|r| r.m);
    let terminal_onset_m = (trailing > 0).then(|| m_hi + 1 - trailing);
    Ok(CriterionReport {
        n,
        m_range: (m_lo, m_hi),
        results,
        verdict,
        first_vanishing_m,
        terminal_onset_m,
    })
}

/// Largest coefficient modulus, for reporting.
pub fn max_abs_coeff(p: &IntPoly) -> BigInt {
    p.coeffs().iter().map(|c| c.abs()).max().unwrap_or_default()
}
