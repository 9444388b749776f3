//! The keyhole-like contour `Γ(δ)`, Cauchy coefficient recovery over it,
//! the capacity certificate for its image under `ι(z) = 1/z`, and the
//! explicit Hankel determinant bound.
//!
//! `Γ(δ)` is traversed counterclockwise as four pieces: the outer arc of
//! radius `s` for `t ∈ [ψ, φ]`, the radial segment at angle `φ` from `s` in
//! to `1-δ`, the inner arc of radius `1-δ` for `t ∈ [φ, ψ+2π]`, and the
//! radial segment at angle `ψ` from `1-δ` out to `s`. Both arcs run with
//! increasing angle, so the winding number about the origin is 1.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::capacity::{transfinite_diameter, CapacityError, CapacityEstimate, PointCloud};
use crate::linalg::bareiss_det;
use crate::quadrature::gauss_legendre;
use crate::scalar::{Real, C};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContourError {
    #[error("angles must satisfy 0 < phi - psi < 2pi (phi = {phi}, psi = {psi})")]
    BadAngles { phi: f64, psi: f64 },
    #[error("radii must satisfy s > 1 and 0 <= delta < 1 (s = {s}, delta = {delta})")]
    BadRadii { s: f64, delta: f64 },
    #[error("sampling density must be at least {min}, got {got}")]
    BadDensity { got: f64, min: f64 },
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error("no d_n below {threshold} for n <= {n_max}; best was {best}")]
    NoCertificate { best: f64, threshold: f64, n_max: usize },
    #[error("quadrature for index {index} did not stabilize after {panels} panels per piece")]
    QuadratureDivergence { index: usize, panels: usize },
    #[error("invalid bound inputs: {0}")]
    BadBoundInputs(String),
    #[error("no m <= {m_max} brings the bound below 1")]
    NoM0 { m_max: usize },
    #[error("symmetrization size must be 1 or 2, got {0}")]
    UnsupportedSize(usize),
}

/// One smooth piece of the contour, parametrized over `u ∈ [0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Piece<F: Real> {
    /// `radius · e^{i(t0 + u(t1 - t0))}`
    Arc { radius: F, t0: F, t1: F },
    /// `(r0 + u(r1 - r0)) · e^{i·angle}`
    Segment { angle: F, r0: F, r1: F },
}

impl<F: Real> Piece<F> {
    pub fn point(&self, u: F) -> C<F> {
        match *self {
            Piece::Arc { radius, t0, t1 } => C::from_polar(radius, t0 + u * (t1 - t0)),
            Piece::Segment { angle, r0, r1 } => C::from_polar(r0 + u * (r1 - r0), angle),
        }
    }

    /// `dz/du`
    pub fn tangent(&self, u: F) -> C<F> {
        match *self {
            Piece::Arc { radius, t0, t1 } => {
                C::from_polar(radius, t0 + u * (t1 - t0)) * C::new(F::zero(), t1 - t0)
            }
            Piece::Segment { angle, r0, r1 } => C::from_polar(r1 - r0, angle),
        }
    }

    pub fn length(&self) -> F {
        match *self {
            Piece::Arc { radius, t0, t1 } => radius * (t1 - t0).abs(),
            Piece::Segment { r0, r1, .. } => (r1 - r0).abs(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GammaContour<F: Real> {
    pub phi: F,
    pub psi: F,
    pub s: F,
    pub delta: F,
}

pub fn make_gamma<F: Real>(phi: F, psi: F, s: F, delta: F) -> Result<GammaContour<F>, ContourError> {
    let gap = phi - psi;
    if !(gap > F::zero() && gap < F::TAU()) {
        return Err(ContourError::BadAngles {
            phi: phi.to_f64().unwrap_or(f64::NAN),
            psi: psi.to_f64().unwrap_or(f64::NAN),
        });
    }
    if !(s > F::one() && delta >= F::zero() && delta < F::one()) {
        return Err(ContourError::BadRadii {
            s: s.to_f64().unwrap_or(f64::NAN),
            delta: delta.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(GammaContour { phi, psi, s, delta })
}

impl<F: Real> GammaContour<F> {
    pub fn inner_radius(&self) -> F {
        F::one() - self.delta
    }

    /// The four pieces in traversal order; each starts where the previous ends.
    pub fn pieces(&self) -> [Piece<F>; 4] {
        let r = self.inner_radius();
        [
            Piece::Arc { radius: self.s, t0: self.psi, t1: self.phi },
            Piece::Segment { angle: self.phi, r0: self.s, r1: r },
            Piece::Arc { radius: r, t0: self.phi, t1: self.psi + F::TAU() },
            Piece::Segment { angle: self.psi, r0: r, r1: self.s },
        ]
    }

    /// Does `z` lie strictly inside the enclosed region?
    pub fn encloses(&self, z: C<F>) -> bool {
        let r = z.norm();
        if r < self.inner_radius() {
            return true;
        }
        if r >= self.s {
            return false;
        }
        let mut t = z.arg();
        while t < self.psi {
            t = t + F::TAU();
        }
        while t >= self.psi + F::TAU() {
            t = t - F::TAU();
        }
        t > self.psi && t < self.phi
    }
}

/// `L = (1-δ)(ψ+2π-φ) + 2(s-(1-δ)) + s(φ-ψ)`.
pub fn contour_length<F: Real>(g: &GammaContour<F>) -> F {
    let r = g.inner_radius();
    let two = F::lit(2.0);
    r * (g.psi + F::TAU() - g.phi) + two * (g.s - r) + g.s * (g.phi - g.psi)
}

/// `η = min |z|` over the contour, attained on the inner arc.
pub fn min_modulus<F: Real>(g: &GammaContour<F>) -> F {
    g.inner_radius()
}

pub const MIN_DENSITY: f64 = 64.0;

/// Samples every piece on its own uniform parameter grid with spacing at most
/// `1/density` in arc length. Each piece contributes its start point but not
/// its end point, so every corner appears once.
pub fn sample_contour<F: Real>(g: &GammaContour<F>, density: F) -> Result<PointCloud<F>, ContourError> {
    if !(density >= F::lit(MIN_DENSITY)) {
        return Err(ContourError::BadDensity {
            got: density.to_f64().unwrap_or(f64::NAN),
            min: MIN_DENSITY,
        });
    }
    let mut pts = Vec::new();
    for piece in g.pieces() {
        let k = (density * piece.length()).ceil().to_usize().unwrap_or(1).max(1);
        let kf = F::from_usize_lossy(k);
        pts.extend((0..k).map(|i| piece.point(F::from_usize_lossy(i) / kf)));
    }
    Ok(PointCloud::new(pts, "gamma")?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IotaOptions {
    pub margin: f64,
    pub density: f64,
}

impl Default for IotaOptions {
    fn default() -> Self {
        IotaOptions {
            margin: 0.02,
            density: 512.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IotaReport<F: Real> {
    pub contour: GammaContour<F>,
    pub options: IotaOptions,
    pub cloud_size: usize,
    /// Smallest `n` with `d_n < 1 - margin`.
    pub certified_n: usize,
    pub certified_d: F,
    /// `1 - margin`. Since `d_k` is nonincreasing in `k`, it bounds `d_k` for every `k ≥ certified_n`.
    pub rho: F,
    pub estimate: CapacityEstimate<F>,
}

/// Maps the sampled contour through `z ↦ 1/z` and looks for `d_n < 1 - margin`.
pub fn iota_capacity_check<F: Real>(
    g: &GammaContour<F>,
    n_max: usize,
    seed: u64,
    options: IotaOptions,
) -> Result<IotaReport<F>, ContourError> {
    let cloud = sample_contour(g, F::lit(options.density))?.inverted()?;
    let estimate = transfinite_diameter(&cloud, n_max, seed)?;
    let threshold = F::one() - F::lit(options.margin);
    let hit = estimate
        .n_values
        .iter()
        .zip(&estimate.d_seq)
        .find(|(_, d)| **d < threshold);
    match hit {
        Some((&n, &d)) => Ok(IotaReport {
            contour: *g,
            options,
            cloud_size: cloud.len(),
            certified_n: n,
            certified_d: d,
            rho: threshold,
            estimate,
        }),
        None => Err(ContourError::NoCertificate {
            best: estimate.d_upper.to_f64().unwrap_or(f64::NAN),
            threshold: threshold.to_f64().unwrap_or(f64::NAN),
            n_max,
        }),
    }
}

/// A quadrature rule for `∮_Γ h(z) dz`: nodes `z_k` with weights `w_k·z'(u_k)`.
#[derive(Clone, Debug)]
pub struct ContourRule<F: Real> {
    pub nodes: Vec<C<F>>,
    pub weights: Vec<C<F>>,
}

impl<F: Real> ContourRule<F> {
    /// Composite Gauss–Legendre with `panels` equal panels per piece.
    pub fn new(g: &GammaContour<F>, panels: usize, order: usize) -> Self {
        let (x, w) = gauss_legendre::<F>(order);
        let half = F::lit(0.5);
        let pf = F::from_usize_lossy(panels);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for piece in g.pieces() {
            for p in 0..panels {
                let a = F::from_usize_lossy(p) / pf;
                let h = F::one() / pf;
                for (xi, wi) in x.iter().zip(&w) {
                    let u = a + h * half * (*xi + F::one());
                    nodes.push(piece.point(u));
                    weights.push(piece.tangent(u) * (*wi * h * half));
                }
            }
        }
        ContourRule { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `(1/2πi) Σ w_k g(z_k) z_k^{-(v+1)}`, summed in node order.
    pub fn coeff(&self, gz: &[C<F>], v: usize) -> C<F> {
        let mut acc = C::new(F::zero(), F::zero());
        for ((z, w), g) in self.nodes.iter().zip(&self.weights).zip(gz) {
            acc = acc + *g * *w * z.powi(-(v as i32 + 1));
        }
        acc / C::new(F::zero(), F::TAU())
    }

    pub fn eval<G>(&self, g: &G) -> Vec<C<F>>
    where
        G: Fn(C<F>) -> C<F> + Sync,
    {
        self.nodes.par_iter().map(|&z| g(z)).collect()
    }
}

pub const GAUSS_ORDER: usize = 16;
pub const MAX_PANELS: usize = 1 << 12;

/// Default stabilization tolerance: `1e-8`, or a few hundred ulps when the
/// scalar type cannot resolve that.
pub fn default_tol<F: Real>() -> F {
    F::lit(1e-8).max(F::epsilon() * F::lit(1000.0))
}

/// Converged coefficients `c_0..=c_vmax` with the panel count that achieved them.
#[derive(Clone, Debug)]
pub struct CauchyCoeffs<F: Real> {
    pub coeffs: Vec<C<F>>,
    pub panels: usize,
}

/// `(1/2πi) ∮_Γ g(z) z^{-(v+1)} dz` for `v = 0..=v_max`, doubling the panel
/// count per piece until successive estimates agree to `tol·max(1, |c_v|)`.
pub fn cauchy_coeffs<F, G>(
    g: &G,
    gamma: &GammaContour<F>,
    v_max: usize,
    tol: F,
) -> Result<CauchyCoeffs<F>, ContourError>
where
    F: Real,
    G: Fn(C<F>) -> C<F> + Sync,
{
    let estimate = |panels: usize| {
        let rule = ContourRule::new(gamma, panels, GAUSS_ORDER);
        let gz = rule.eval(g);
        (0..=v_max).map(|v| rule.coeff(&gz, v)).collect::<Vec<_>>()
    };
    let mut panels = 1;
    let mut prev = estimate(panels);
    while panels < MAX_PANELS {
        panels *= 2;
        let next = estimate(panels);
        let settled = prev
            .iter()
            .zip(&next)
            .all(|(a, b)| (a - b).norm() <= tol * b.norm().max(F::one()));
        if settled {
            return Ok(CauchyCoeffs { coeffs: next, panels });
        }
        prev = next;
    }
    let worst = prev.len() - 1;
    Err(ContourError::QuadratureDivergence { index: worst, panels })
}

/// Single coefficient `P_v` via [`cauchy_coeffs`] at the default tolerance.
pub fn cauchy_coeff<F, G>(g: &G, gamma: &GammaContour<F>, v: usize) -> Result<C<F>, ContourError>
where
    F: Real,
    G: Fn(C<F>) -> C<F> + Sync,
{
    let tol = default_tol::<F>();
    let estimate = |panels: usize| {
        let rule = ContourRule::new(gamma, panels, GAUSS_ORDER);
        rule.coeff(&rule.eval(g), v)
    };
    let mut panels = 1;
    let mut prev = estimate(panels);
    while panels < MAX_PANELS {
        panels *= 2;
        let next = estimate(panels);
        if (prev - next).norm() <= tol * next.norm().max(F::one()) {
            return Ok(next);
        }
        prev = next;
    }
    Err(ContourError::QuadratureDivergence { index: v, panels })
}

/// Fixed rule, no refinement: `panels` per piece, `order` Gauss points per panel.
pub fn cauchy_coeff_fixed<F, G>(g: &G, gamma: &GammaContour<F>, v: usize, panels: usize, order: usize) -> C<F>
where
    F: Real,
    G: Fn(C<F>) -> C<F> + Sync,
{
    let rule = ContourRule::new(gamma, panels, order);
    rule.coeff(&rule.eval(g), v)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetrizationReport {
    pub m: usize,
    /// `(m+1)!·det(c_{i+j})` from recovered coefficients, as `[re, im]`.
    pub direct: [f64; 2],
    /// The `(m+1)`-fold integral of `Π g(z_k)/z_k · Π_{j<k}(1/z_j - 1/z_k)^2`, as `[re, im]`.
    pub integral: [f64; 2],
    pub residual: f64,
    pub panels: usize,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Computes `(m+1)!·H_m` as a Hankel determinant of Cauchy coefficients and
/// as a symmetrized multiple contour integral, and reports
/// `|a - b| / max(|a|, |b|, 1)`.
pub fn symmetrization_check<F, G>(g: &G, gamma: &GammaContour<F>, m: usize) -> Result<SymmetrizationReport, ContourError>
where
    F: Real,
    G: Fn(C<F>) -> C<F> + Sync,
{
    if !(1..=2).contains(&m) {
        return Err(ContourError::UnsupportedSize(m));
    }
    let cc = cauchy_coeffs(g, gamma, 2 * m, default_tol::<F>())?;
    let c: Vec<C<f64>> = cc.coeffs.iter().map(to_c64).collect();
    let mat: Vec<Vec<Cx>> = (0..=m).map(|i| (0..=m).map(|j| Cx(c[i + j])).collect()).collect();
    let direct = bareiss_det(mat).0 * factorial(m + 1);

    let rule = ContourRule::new(gamma, cc.panels, GAUSS_ORDER);
    let gz = rule.eval(g);
    // per-node factor w_k g(z_k) / z_k and the inverse node 1/z_k
    let f: Vec<C<f64>> = (0..rule.len())
        .map(|k| to_c64(&(rule.weights[k] * gz[k] / rule.nodes[k])))
        .collect();
    let inv: Vec<C<f64>> = rule.nodes.iter().map(|z| to_c64(&z.inv())).collect();
    let n = rule.len();
    let partial: Vec<C<f64>> = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut acc = C::new(0.0, 0.0);
            for b in 0..n {
                let vab = inv[a] - inv[b];
                let base = f[a] * f[b] * vab * vab;
                if m == 1 {
                    acc += base;
                } else {
                    for cidx in 0..n {
                        let v2 = (inv[a] - inv[cidx]) * (inv[b] - inv[cidx]);
                        acc += base * f[cidx] * v2 * v2;
                    }
                }
            }
            acc
        })
        .collect();
    let total: C<f64> = partial.into_iter().fold(C::new(0.0, 0.0), |a, b| a + b);
    let integral = total / C::new(0.0, std::f64::consts::TAU).powi(m as i32 + 1);
    let residual = (direct - integral).norm() / direct.norm().max(integral.norm()).max(1.0);
    Ok(SymmetrizationReport {
        m,
        direct: [direct.re, direct.im],
        integral: [integral.re, integral.im],
        residual,
        panels: cc.panels,
    })
}

fn to_c64<F: Real>(z: &C<F>) -> C<f64> {
    C::new(z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN))
}

/// Complex `f64` wrapper so small numeric determinants can reuse the Bareiss code.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Cx(C<f64>);

impl num_traits::Zero for Cx {
    fn zero() -> Self {
        Cx(C::new(0.0, 0.0))
    }
    fn is_zero(&self) -> bool {
        self.0.norm() == 0.0
    }
}

impl num_traits::One for Cx {
    fn one() -> Self {
        Cx(C::new(1.0, 0.0))
    }
}

impl std::ops::Add for Cx {
    type Output = Cx;
    fn add(self, o: Cx) -> Cx {
        Cx(self.0 + o.0)
    }
}

impl std::ops::Sub for Cx {
    type Output = Cx;
    fn sub(self, o: Cx) -> Cx {
        Cx(self.0 - o.0)
    }
}

impl std::ops::Mul for Cx {
    type Output = Cx;
    fn mul(self, o: Cx) -> Cx {
        Cx(self.0 * o.0)
    }
}

impl std::ops::Neg for Cx {
    type Output = Cx;
    fn neg(self) -> Cx {
        Cx(-self.0)
    }
}

impl crate::scalar::ExactRing for Cx {
    fn exact_div(&self, rhs: &Self) -> Option<Self> {
        (!num_traits::Zero::is_zero(rhs)).then(|| Cx(self.0 / rhs.0))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundInputs<F: Real> {
    /// Contour length `L`.
    pub l: F,
    /// `M`, sup of `|g_θ|` on the contour over the `θ`-interval.
    pub m_sup: F,
    /// `η = min |z|` on the contour.
    pub eta: F,
    /// `ρ`, an upper bound for `d_{m+1}` of the inverted contour.
    pub rho: F,
    /// Hankel size `m`.
    pub m: usize,
}

impl<F: Real> BoundInputs<F> {
    pub fn validate(&self) -> Result<(), ContourError> {
        let bad = |msg: &str| Err(ContourError::BadBoundInputs(msg.to_string()));
        if !(self.l > F::zero()) {
            return bad("L must be positive");
        }
        if !(self.m_sup >= F::zero()) || !self.m_sup.is_finite() {
            return bad("M must be finite and nonnegative");
        }
        if !(self.eta > F::zero()) {
            return bad("eta must be positive");
        }
        if !(self.rho > F::zero() && self.rho < F::one()) {
            return bad("rho must lie in (0, 1)");
        }
        Ok(())
    }
}

/// `(2π)^{-(m+1)} / (m+1)! · L^{m+1} M^{m+1} η^{-(m+1)} ρ^{m(m+1)}`, evaluated in log space.
pub fn hankel_bound<F: Real>(b: &BoundInputs<F>) -> Result<F, ContourError> {
    b.validate()?;
    if b.m_sup == F::zero() {
        return Ok(F::zero());
    }
    let k = F::from_usize_lossy(b.m + 1);
    let log_fact: F = (2..=b.m + 1).map(|i| F::from_usize_lossy(i).ln()).sum();
    let log = k * (b.l.ln() + b.m_sup.ln() - b.eta.ln() - F::TAU().ln())
        - log_fact
        + F::from_usize_lossy(b.m * (b.m + 1)) * b.rho.ln();
    Ok(log.exp())
}

/// Smallest `m` in `1..=m_max` with `hankel_bound < 1`.
pub fn find_m0<F: Real>(l: F, m_sup: F, eta: F, rho: F, m_max: usize) -> Result<usize, ContourError> {
    for m in 1..=m_max {
        let b = BoundInputs { l, m_sup, eta, rho, m };
        if hankel_bound(&b)? < F::one() {
            return Ok(m);
        }
    }
    Err(ContourError::NoM0 { m_max })
}

/// Sampled estimate of `M = sup |g_θ(z)|` over the contour and `θ ∈ [lo, hi]`.
/// A lower estimate of the true sup; callers add their own safety factor.
pub fn sample_sup<F, G>(g: &G, gamma: &GammaContour<F>, theta: (F, F), n_theta: usize, density: F) -> Result<F, ContourError>
where
    F: Real,
    G: Fn(F, C<F>) -> C<F> + Sync,
{
    let cloud = sample_contour(gamma, density)?;
    let steps = n_theta.max(1);
    let thetas: Vec<F> = (0..=steps)
        .map(|i| theta.0 + (theta.1 - theta.0) * F::from_usize_lossy(i) / F::from_usize_lossy(steps))
        .collect();
    let maxes: Vec<F> = thetas
        .par_iter()
        .map(|&t| {
            cloud
                .points()
                .iter()
                .map(|&z| g(t, z).norm())
                .fold(F::zero(), F::max)
        })
        .collect();
    Ok(maxes.into_iter().fold(F::zero(), F::max))
}
