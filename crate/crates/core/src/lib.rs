//! Rationality tests for integer power series in one and two variables.
//!
//! * [`series`], [`poly`]: exact series and polynomials over `Z`.
//! * [`hankel`]: Kronecker/Hankel determinants and Padé reconstruction.
//! * [`restriction`]: restriction polynomials `P_v` and the Hankel criterion in two variables.
//! * [`capacity`]: Fekete points and transfinite-diameter estimates.
//! * [`contour`]: the contour `Γ(δ)`, Cauchy coefficients and the Hankel bound.
//! * [`dfinite`]: D-finite systems, recurrences, ODE continuation.
//! * [`input`]: JSON schemas used by the command-line tool.
//!
//! Numerical code is generic over [`scalar::Real`]; the `*64` aliases below
//! fix it to `f64`.

// Float checks are written `!(x > 0)` on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod contour;
pub mod decimal;
pub mod dfinite;
pub mod hankel;
pub mod input;
pub mod linalg;
pub mod poly;
pub mod quadrature;
pub mod restriction;
pub mod scalar;
pub mod series;

use thiserror::Error;

pub use scalar::{ExactRing, Real, C};

pub type C64 = C<f64>;
pub type PointCloud64 = capacity::PointCloud<f64>;
pub type FeketeSet64 = capacity::FeketeSet<f64>;
pub type CapacityEstimate64 = capacity::CapacityEstimate<f64>;
pub type GammaContour64 = contour::GammaContour<f64>;
pub type IotaReport64 = contour::IotaReport<f64>;
pub type BoundInputs64 = contour::BoundInputs<f64>;
pub type OdeSystem64 = dfinite::OdeSystem<f64>;
pub type RationalMatrix64 = dfinite::RationalMatrix<f64>;

/// Any error raised by this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Series(#[from] series::SeriesError),
    #[error(transparent)]
    Hankel(#[from] hankel::HankelError),
    #[error(transparent)]
    Restriction(#[from] restriction::RestrictionError),
    #[error(transparent)]
    Capacity(#[from] capacity::CapacityError),
    #[error(transparent)]
    Contour(#[from] contour::ContourError),
    #[error(transparent)]
    DFinite(#[from] dfinite::DFiniteError),
    #[error(transparent)]
    Input(#[from] input::InputError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
