//! Transfinite diameter and Chebyshev-constant estimates for planar point clouds.
//!
//! `d_n = V_n^{2/(n(n-1))}` with `V_n` the largest product of pairwise
//! distances over `n`-point subsets, and `τ_n = M_n^{1/n}` with `M_n` the
//! smallest sup-norm of a monic degree-`n` polynomial. Both sequences
//! converge to the logarithmic capacity. On a finite cloud, Fekete sets are
//! found by greedy initialization plus single-point exchange; the
//! Chebyshev side only ever produces upper bounds via feasible monic
//! polynomials (by default the one vanishing at the Fekete nodes).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::scalar::{Real, C};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CapacityError {
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("point cloud contains a non-finite coordinate")]
    NonFinitePoint,
    #[error("need at least {needed} distinct points, cloud has {available}")]
    TooFewPoints { needed: usize, available: usize },
    #[error("Fekete size must be at least 2, got {0}")]
    InvalidSize(usize),
    #[error("polynomial nodes are not distinct")]
    DuplicateNodes,
}

/// Finite discretization of a compact set: nonempty, finite, duplicate-free.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud<F: Real> {
    points: Vec<C<F>>,
    label: String,
}

impl<F: Real> PointCloud<F> {
    /// Drops exact duplicates, keeping first occurrences in order.
    pub fn new(points: Vec<C<F>>, label: impl Into<String>) -> Result<Self, CapacityError> {
        if points.is_empty() {
            return Err(CapacityError::EmptyCloud);
        }
        if points.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(CapacityError::NonFinitePoint);
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        let key = |z: &C<F>| (z.re, z.im);
        order.sort_by(|&a, &b| {
            key(&points[a])
                .partial_cmp(&key(&points[b]))
                .expect("finite")
                .then(a.cmp(&b))
        });
        let mut keep = vec![true; points.len()];
        for w in order.windows(2) {
            if points[w[0]] == points[w[1]] {
                keep[w[1]] = false;
            }
        }
        let points = points
            .into_iter()
            .zip(keep)
            .filter_map(|(z, k)| k.then_some(z))
            .collect();
        Ok(PointCloud {
            points,
            label: label.into(),
        })
    }

    /// `count` equally spaced points on the circle `|z - center| = radius`, starting at angle 0.
    pub fn circle(center: C<F>, radius: F, count: usize) -> Result<Self, CapacityError> {
        let step = F::TAU() / F::from_usize_lossy(count.max(1));
        let pts = (0..count)
            .map(|i| center + C::from_polar(radius, step * F::from_usize_lossy(i)))
            .collect();
        Self::new(pts, format!("circle(r={radius})"))
    }

    /// `count ≥ 2` equally spaced points on the segment `[a, b]`, endpoints included.
    pub fn segment(a: C<F>, b: C<F>, count: usize) -> Result<Self, CapacityError> {
        let count = count.max(2);
        let last = F::from_usize_lossy(count - 1);
        let pts = (0..count)
            .map(|i| a + (b - a) * (F::from_usize_lossy(i) / last))
            .collect();
        Self::new(pts, "segment")
    }

    pub fn points(&self) -> &[C<F>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn map(&self, f: impl Fn(C<F>) -> C<F>, label: impl Into<String>) -> Result<Self, CapacityError> {
        Self::new(self.points.iter().map(|&z| f(z)).collect(), label)
    }

    /// `c·K`
    pub fn scaled(&self, c: C<F>) -> Result<Self, CapacityError> {
        self.map(|z| z * c, format!("{}*({c})", self.label))
    }

    /// Image under `z ↦ 1/z`; fails if the cloud contains the origin.
    pub fn inverted(&self) -> Result<Self, CapacityError> {
        self.map(|z| z.inv(), format!("1/({})", self.label))
    }

    pub fn centroid(&self) -> C<F> {
        let n = F::from_usize_lossy(self.points.len());
        self.points.iter().fold(C::new(F::zero(), F::zero()), |a, &z| a + z) / n
    }

    /// Cloud point nearest to `z` (lowest index on ties).
    pub fn snap(&self, z: C<F>) -> C<F> {
        let mut best = self.points[0];
        for &p in &self.points[1..] {
            if (p - z).norm_sqr() < (best - z).norm_sqr() {
                best = p;
            }
        }
        best
    }
}

/// `Σ_{i<j} log|z_i - z_j|`, i.e. `log V` of the configuration.
pub fn log_vandermonde<F: Real>(points: &[C<F>]) -> F {
    let mut acc = F::zero();
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            acc = acc + (a - b).norm().ln();
        }
    }
    acc
}

/// `d_n` from `log V_n`.
pub fn normalized_diameter<F: Real>(log_v: F, n: usize) -> F {
    let pairs = F::from_usize_lossy(n * (n - 1) / 2);
    (log_v / pairs).exp()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeketeSet<F: Real> {
    /// Indices into the cloud, in slot order.
    pub indices: Vec<usize>,
    #[serde(skip)]
    pub points: Vec<C<F>>,
    pub log_v: F,
    pub sweeps: usize,
    /// `false` if the sweep cap was hit before a sweep without exchanges.
    pub converged: bool,
}

impl<F: Real> FeketeSet<F> {
    pub fn n(&self) -> usize {
        self.indices.len()
    }

    /// `V_n`, may over/underflow for large `n`; prefer `log_v`.
    pub fn vandermonde(&self) -> F {
        self.log_v.exp()
    }

    pub fn d_n(&self) -> F {
        normalized_diameter(self.log_v, self.n())
    }
}

pub const MAX_SWEEPS: usize = 50;

/// Relative slack in log space below which two products count as equal.
fn tie_tol<F: Real>(scale: F) -> F {
    F::epsilon() * F::lit(256.0) * (F::one() + scale.abs())
}

/// Index of the largest value, taking the lowest index among near-ties.
fn argmax_stable<F: Real>(vals: impl Iterator<Item = (usize, F)> + Clone) -> Option<(usize, F)> {
    let max = vals.clone().map(|(_, v)| v).fold(F::neg_infinity(), F::max);
    if max == F::neg_infinity() {
        return None;
    }
    let tol = tie_tol(max);
    vals.into_iter().find(|&(_, v)| v >= max - tol)
}

/// A 1-exchange-optimal `n`-subset of the cloud for the product of pairwise distances.
///
/// Initialization takes the diameter pair, then greedily adds the point
/// maximizing the product of distances to those already chosen. Exchange
/// sweeps then visit the slots in a seed-shuffled order and swap a slot for
/// the best cloud point when that strictly increases the product, until a
/// sweep makes no exchange or `MAX_SWEEPS` is reached.
pub fn fekete_points<F: Real>(
    cloud: &PointCloud<F>,
    n: usize,
    seed: u64,
) -> Result<FeketeSet<F>, CapacityError> {
    if n < 2 {
        return Err(CapacityError::InvalidSize(n));
    }
    let pts = cloud.points();
    if pts.len() < n {
        return Err(CapacityError::TooFewPoints {
            needed: n,
            available: pts.len(),
        });
    }
    let lg = |a: C<F>, b: C<F>| (a - b).norm().ln();

    // diameter pair
    let (mut bi, mut bj, mut bd) = (0, 1, F::neg_infinity());
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = (pts[i] - pts[j]).norm_sqr();
            if d > bd {
                (bi, bj, bd) = (i, j, d);
            }
        }
    }
    let mut chosen = vec![bi, bj];
    let mut member = vec![false; pts.len()];
    member[bi] = true;
    member[bj] = true;
    let mut pot: Vec<F> = pts.iter().map(|&c| lg(c, pts[bi]) + lg(c, pts[bj])).collect();
    while chosen.len() < n {
        let (c, _) = argmax_stable(
            pot.iter()
                .enumerate()
                .filter(|&(i, _)| !member[i])
                .map(|(i, &v)| (i, v)),
        )
        .expect("cloud has enough points");
        chosen.push(c);
        member[c] = true;
        for (x, p) in pot.iter_mut().enumerate() {
            if !member[x] {
                *p = *p + lg(pts[x], pts[c]);
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut slots: Vec<usize> = (0..n).collect();
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        // fresh potentials each sweep: U(x) = Σ_{j in set} log|x - z_j| for x outside the set
        for (x, p) in pot.iter_mut().enumerate() {
            *p = if member[x] {
                F::neg_infinity()
            } else {
                chosen.iter().map(|&j| lg(pts[x], pts[j])).sum()
            };
        }
        slots.shuffle(&mut rng);
        let mut exchanged = false;
        for &s in &slots {
            let old = chosen[s];
            let base: F = chosen
                .iter()
                .filter(|&&j| j != old)
                .map(|&j| lg(pts[old], pts[j]))
                .sum();
            let Some((cand, val)) = argmax_stable(
                pot.iter()
                    .enumerate()
                    .filter(|&(i, _)| !member[i])
                    .map(|(i, &u)| (i, u - lg(pts[i], pts[old]))),
            ) else {
                continue;
            };
            if val <= base + tie_tol(base) {
                continue;
            }
            exchanged = true;
            chosen[s] = cand;
            member[old] = false;
            member[cand] = true;
            for (x, p) in pot.iter_mut().enumerate() {
                if !member[x] && x != old {
                    *p = *p - lg(pts[x], pts[old]) + lg(pts[x], pts[cand]);
                }
            }
            pot[cand] = F::neg_infinity();
            pot[old] = chosen.iter().map(|&j| lg(pts[old], pts[j])).sum();
        }
        if !exchanged {
            converged = true;
            break;
        }
    }
    let points: Vec<C<F>> = chosen.iter().map(|&i| pts[i]).collect();
    Ok(FeketeSet {
        log_v: log_vandermonde(&points),
        indices: chosen,
        points,
        sweeps,
        converged,
    })
}

/// `log max_{z in K} Π|z - node_i|`.
pub fn chebyshev_upper_log<F: Real>(cloud: &PointCloud<F>, nodes: &[C<F>]) -> Result<F, CapacityError> {
    for (i, a) in nodes.iter().enumerate() {
        if nodes[i + 1..].contains(a) {
            return Err(CapacityError::DuplicateNodes);
        }
    }
    Ok(cloud
        .points()
        .iter()
        .map(|&z| nodes.iter().map(|&t| (z - t).norm().ln()).sum::<F>())
        .fold(F::neg_infinity(), F::max))
}

/// `max_{z in K} |Π (z - node_i)|`, the sup-norm on the cloud of the monic
/// polynomial with the given roots, hence an upper bound for `M_n(K)`.
pub fn chebyshev_upper<F: Real>(cloud: &PointCloud<F>, nodes: &[C<F>]) -> Result<F, CapacityError> {
    chebyshev_upper_log(cloud, nodes).map(F::exp)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityEstimate<F: Real> {
    pub label: String,
    pub n_values: Vec<usize>,
    pub d_seq: Vec<F>,
    /// `(sup_K |Π(z - fekete_i)|)^{1/n}`, an upper bound for `τ_n`.
    pub tau_upper_seq: Vec<F>,
    /// `min d_seq`.
    pub d_upper: F,
    /// `n` with `d_{n+1} > d_n` beyond `MONOTONE_TOL`: optimizer shortfall at `n` or `n+1`.
    pub monotonicity_violations: Vec<usize>,
    /// Sizes whose exchange phase hit the sweep cap.
    pub unconverged: Vec<usize>,
}

/// Relative tolerance for the `d_{n+1} ≤ d_n` check.
pub const MONOTONE_TOL: f64 = 1e-6;

/// Runs `fekete_points` for `n = 2..=n_max` (independently, same seed).
pub fn transfinite_diameter<F: Real>(
    cloud: &PointCloud<F>,
    n_max: usize,
    seed: u64,
) -> Result<CapacityEstimate<F>, CapacityError> {
    if n_max < 2 {
        return Err(CapacityError::InvalidSize(n_max));
    }
    if cloud.len() < n_max {
        return Err(CapacityError::TooFewPoints {
            needed: n_max,
            available: cloud.len(),
        });
    }
    let runs: Vec<(FeketeSet<F>, F)> = (2..=n_max)
        .into_par_iter()
        .map(|n| {
            let set = fekete_points(cloud, n, seed)?;
            let tau = (chebyshev_upper_log(cloud, &set.points)? / F::from_usize_lossy(n)).exp();
            Ok((set, tau))
        })
        .collect::<Result<_, CapacityError>>()?;
    let d_seq: Vec<F> = runs.iter().map(|(s, _)| s.d_n()).collect();
    let tol = F::lit(MONOTONE_TOL);
    let monotonicity_violations = d_seq
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] > w[0] * (F::one() + tol))
        .map(|(i, _)| i + 2)
        .collect();
    Ok(CapacityEstimate {
        label: cloud.label().to_string(),
        n_values: (2..=n_max).collect(),
        d_upper: d_seq.iter().copied().fold(F::infinity(), F::min),
        tau_upper_seq: runs.iter().map(|(_, t)| *t).collect(),
        unconverged: runs
            .iter()
            .filter(|(s, _)| !s.converged)
            .map(|(s, _)| s.n())
            .collect(),
        d_seq,
        monotonicity_violations,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConsistencyReport<F: Real> {
    pub n: usize,
    pub d_n: F,
    pub tau_upper: F,
    pub gap: F,
    /// Informational: the Chebyshev bound sits below `d_n` (usual, since both
    /// are upper bounds and `τ_n` typically converges faster).
    pub tau_below_d: bool,
    pub estimate: CapacityEstimate<F>,
}

/// Compares the final `d_n` and `τ_n` upper bound at `n = n_max`.
pub fn d_tau_consistency<F: Real>(
    cloud: &PointCloud<F>,
    n_max: usize,
    seed: u64,
) -> Result<ConsistencyReport<F>, CapacityError> {
    if n_max < 4 {
        return Err(CapacityError::InvalidSize(n_max));
    }
    let estimate = transfinite_diameter(cloud, n_max, seed)?;
    let d_n = *estimate.d_seq.last().expect("nonempty");
    let tau_upper = *estimate.tau_upper_seq.last().expect("nonempty");
    Ok(ConsistencyReport {
        n: n_max,
        d_n,
        tau_upper,
        gap: (d_n - tau_upper).abs(),
        tau_below_d: tau_upper < d_n,
        estimate,
    })
}
