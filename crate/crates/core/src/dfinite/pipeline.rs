//! The two-variable rationality pipeline at desk scale: build the
//! coefficient table, run the restricted Hankel criterion, and on positive
//! evidence reconstruct the `θ = 0` slice `g_0(z) = f(z, z^n)` exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use super::ode::{companion_system, ode_continue, ContinueOptions};
use super::system::DFiniteSystem;
use super::DFiniteError;
use crate::hankel::{expand_exact, reconstruct_rational};
use crate::restriction::{criterion_test, restriction_polys, CriterionReport, Verdict};
use crate::scalar::C;
use crate::series::{BiSeries, RationalFn};

#[derive(Clone, Debug)]
pub enum PipelineInput {
    System(DFiniteSystem),
    Table(BiSeries),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PipelineOptions {
    /// Diagonal exponent `n` in `f(z, e^{iθ} z^n)`.
    pub n: usize,
    /// Total-degree truncation `N`.
    pub order: usize,
    pub m_lo: usize,
    pub m_hi: usize,
    /// Run the ODE continuation demo when the input is a system.
    pub continuation_demo: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SliceReconstruction {
    /// Degree bound `d` used for the fit.
    pub degree: usize,
    pub rational: RationalFn,
    /// The fit reproduces the slice exactly through this index.
    pub matches_through: usize,
}

/// Root-test style radius estimates: `exp(-slope)` of a least-squares fit of
/// `log` coefficient size against index over the upper half of the table.
/// `None` when too few nonzero terms are available.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadiusEstimate {
    /// From `a_{j0}`.
    pub z: Option<f64>,
    /// From `a_{0k}`.
    pub w: Option<f64>,
    /// From `S_d = Σ_{j+k=d} |a_{jk}|`, the equal-radius polydisc.
    pub polydisc: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuationDemo {
    pub z0: [f64; 2],
    pub w_end: [f64; 2],
    /// `f(z0, w_end)` from continuation of the `w`-equation.
    pub value: [f64; 2],
    pub steps: usize,
    pub max_residual: f64,
    /// Difference from the truncated table sum at the halfway point.
    pub interior_check: f64,
    /// Candidate `z0` rejected before this one succeeded.
    pub rejected_candidates: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineReport {
    pub options: PipelineOptions,
    pub source: &'static str,
    pub criterion: CriterionReport,
    pub slice: Option<SliceReconstruction>,
    pub radius: RadiusEstimate,
    pub continuation: Option<ContinuationDemo>,
    pub warnings: Vec<String>,
}

pub const RADIUS_WARN: f64 = 0.9;
const CANDIDATES: usize = 16;

pub fn bell_chen_pipeline(input: &PipelineInput, opts: PipelineOptions) -> Result<PipelineReport, DFiniteError> {
    let mut warnings = Vec::new();
    let (table, system) = match input {
        PipelineInput::Table(t) => (t.clone(), None),
        PipelineInput::System(s) => {
            if !s.is_bivariate() {
                return Err(DFiniteError::InvalidSystem("pipeline needs a two-variable system".into()));
            }
            (s.generate_table(opts.order)?.to_biseries()?, Some(s))
        }
    };
    table.require(opts.order)?;
    let criterion = criterion_test(&table, opts.n, opts.m_lo, opts.m_hi)?;

    let slice = if criterion.verdict == Verdict::RationalEvidence {
        let start = criterion.terminal_onset_m.unwrap_or(opts.m_lo);
        let r = reconstruct_slice(&table, opts.n, opts.order, start)?;
        if r.is_none() {
            warnings.push(format!(
                "no rational fit of degree {start}..{} reproduces the slice through index {}",
                opts.order.saturating_sub(1) / 2,
                opts.order
            ));
        }
        r
    } else {
        None
    };

    let radius = estimate_radius(&table, opts.order);
    for (name, r) in [("z", radius.z), ("w", radius.w), ("polydisc", radius.polydisc)] {
        if let Some(r) = r.filter(|&r| r < RADIUS_WARN) {
            warnings.push(format!(
                "heuristic {name} radius estimate {r:.3} is below 1; convergence on the unit polydisc is doubtful"
            ));
        }
    }

    let continuation = match system {
        Some(s) if opts.continuation_demo => {
            let demo = continuation_demo(s, &table, opts);
            if demo.is_none() {
                warnings.push("continuation demo found no admissible starting point".into());
            }
            demo
        }
        _ => None,
    };

    Ok(PipelineReport {
        options: opts,
        source: if system.is_some() { "system" } else { "table" },
        criterion,
        slice,
        radius,
        continuation,
        warnings,
    })
}

/// Tries degree bounds from `start` upward and keeps the first fit that
/// reproduces the exact slice through `order`.
fn reconstruct_slice(
    table: &BiSeries,
    n: usize,
    order: usize,
    start: usize,
) -> Result<Option<SliceReconstruction>, DFiniteError> {
    let slice = restriction_polys(table, n, order)?.slice_at_one();
    let exact: Vec<BigRational> = slice.coeffs().iter().map(|c| BigRational::from_integer(c.clone())).collect();
    let mut d = start;
    while 2 * d < order {
        if let Ok(r) = reconstruct_rational(&slice, d) {
            if expand_exact(&r, order) == exact {
                return Ok(Some(SliceReconstruction {
                    degree: d,
                    rational: r,
                    matches_through: order,
                }));
            }
        }
        d += 1;
    }
    Ok(None)
}

fn fit_radius(seq: &[(usize, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = seq
        .iter()
        .filter(|(_, v)| *v > 0.0 && v.is_finite())
        .map(|&(d, v)| (d as f64, v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some((-sxy / sxx).exp())
}

fn big_to_f64(x: &BigInt) -> f64 {
    x.abs().to_f64().unwrap_or(f64::INFINITY)
}

pub(crate) fn estimate_radius(t: &BiSeries, order: usize) -> RadiusEstimate {
    let range = (order / 2).max(1)..=order;
    let at = |j: usize, k: usize| t.coeff(j, k).map(big_to_f64).unwrap_or(0.0);
    let z: Vec<(usize, f64)> = range.clone().map(|j| (j, at(j, 0))).collect();
    let w: Vec<(usize, f64)> = range.clone().map(|k| (k, at(0, k))).collect();
    let s: Vec<(usize, f64)> = range.map(|d| (d, (0..=d).map(|j| at(j, d - j)).sum())).collect();
    RadiusEstimate {
        z: fit_radius(&z),
        w: fit_radius(&w),
        polydisc: fit_radius(&s),
    }
}

/// Picks `z0` on `|z| = 1/2` where neither leading coefficient degenerates,
/// then continues the `w`-equation from `w = 0` to `0.95` along the real
/// axis, comparing with the table sum at `w = 0.5` on the way.
fn continuation_demo(sys: &DFiniteSystem, table: &BiSeries, opts: PipelineOptions) -> Option<ContinuationDemo> {
    let zeq = &sys.equations()[0];
    let weq = &sys.equations()[1];
    let p_r = zeq.last()?;
    let order = opts.order;
    let mut rejected = 0;
    for c in 0..CANDIDATES {
        let angle = std::f64::consts::TAU * c as f64 / CANDIDATES as f64;
        let z0 = C::from_polar(0.5, angle);
        let on_slice = z0.powu(opts.n as u32);
        if p_r.eval(z0, on_slice).norm() < 1e-12 {
            rejected += 1;
            continue;
        }
        let Ok(sys_w) = companion_system::<f64>(weq, z0) else {
            rejected += 1;
            continue;
        };
        // (f, f_w, …) at w = 0 from the table
        let s = sys_w.dim();
        let init: Vec<C<f64>> = (0..s)
            .map(|i| {
                let fact: f64 = (1..=i).map(|x| x as f64).product();
                let sum = (0..=order.saturating_sub(i)).fold(C::new(0.0, 0.0), |acc, j| {
                    acc + C::new(table.coeff(j, i).map(|v| v.to_f64().unwrap_or(0.0)).unwrap_or(0.0), 0.0)
                        * z0.powu(j as u32)
                });
                sum * fact
            })
            .collect();
        let Ok(sys_w) = sys_w.with_initial(init) else {
            rejected += 1;
            continue;
        };
        let mid = C::new(0.5, 0.0);
        let end = C::new(0.95, 0.0);
        let o = ContinueOptions::default();
        let Ok(first) = ode_continue(&sys_w, &[C::new(0.0, 0.0), mid], &o) else {
            rejected += 1;
            continue;
        };
        let Ok(sys_mid) = super::ode::OdeSystem::new(sys_w.matrix().clone(), mid, first.end.clone(), sys_w.center(), sys_w.radius())
        else {
            rejected += 1;
            continue;
        };
        let Ok(second) = ode_continue(&sys_mid, &[mid, end], &o) else {
            rejected += 1;
            continue;
        };
        let table_mid = (0..=order).fold(C::new(0.0, 0.0), |acc, j| {
            (0..=order - j).fold(acc, |acc, k| {
                let a = table.coeff(j, k).map(|v| v.to_f64().unwrap_or(0.0)).unwrap_or(0.0);
                acc + z0.powu(j as u32) * mid.powu(k as u32) * a
            })
        });
        let value = second.end[0];
        return Some(ContinuationDemo {
            z0: [z0.re, z0.im],
            w_end: [end.re, end.im],
            value: [value.re, value.im],
            steps: first.steps + second.steps,
            max_residual: first.max_residual.max(second.max_residual),
            interior_check: (first.end[0] - table_mid).norm(),
            rejected_candidates: rejected,
        });
    }
    None
}
