//! D-finite series: recurrences from ODEs, exact coefficient generation,
//! ODE continuation, and the end-to-end two-variable rationality pipeline.

mod ode;
mod pipeline;
mod recurrence;
mod system;

use thiserror::Error;

use crate::hankel::HankelError;
use crate::restriction::RestrictionError;
use crate::series::SeriesError;

pub use ode::{
    companion_system, ode_continue, poly_eval, poly_roots, series_div, taylor_shift, ContinueOptions,
    Continuation, OdeSystem, RationalEntry, RationalMatrix,
};
pub use pipeline::{
    bell_chen_pipeline, ContinuationDemo, PipelineInput, PipelineOptions, PipelineReport, RadiusEstimate,
    SliceReconstruction,
};
pub use recurrence::{generate_coeffs, recurrence_from_ode, RationalSeries, Recurrence};
pub use system::{DFiniteSystem, RationalTable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DFiniteError {
    #[error("every coefficient of the equation is zero")]
    DegenerateEquation,
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("initial value a[{j}][{k}] is required but missing")]
    MissingInitial { j: usize, k: usize },
    #[error("leading recurrence coefficient vanishes at a[{j}][{k}] and no initial value is given")]
    SingularIndex { j: usize, k: usize },
    #[error("initial value a[{j}][{k}] contradicts the recurrence")]
    InconsistentInitials { j: usize, k: usize },
    #[error("the equations have no common solution (first violation near a[{j}][{k}])")]
    InconsistentSystem { j: usize, k: usize },
    #[error("coefficient a[{j}][{k}] is not an integer")]
    NonIntegerCoefficient { j: usize, k: usize },
    #[error("step at ({}, {}) could not reach the residual target (last residual {residual})", at[0], at[1])]
    StepFailure { at: [f64; 2], residual: f64 },
    #[error("path vertex {vertex} lies outside the disc of holomorphy")]
    PathOutsideDomain { vertex: usize },
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("leading coefficient of the w-equation vanishes at w = 0")]
    LeadingCoeffVanishes,
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Restriction(#[from] RestrictionError),
    #[error(transparent)]
    Hankel(#[from] HankelError),
}
