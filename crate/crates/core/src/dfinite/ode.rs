//! Holomorphic linear systems `y' = A(z) y` with rational `A`, continued
//! along polylines by local Taylor expansion.
//!
//! Each step expands `A` around the current point, builds the Taylor
//! coefficients of `y` from `(k+1) Y_{k+1} = Σ_l A_l Y_{k-l}`, and sums them
//! at the step. Steps stay within a fixed fraction of the distance to the
//! nearest pole of `A`, and are accepted only when one full step agrees
//! with two half steps to the residual target.

use serde::Serialize;

use super::DFiniteError;
use crate::poly::BiPoly;
use crate::scalar::{Real, C};

fn czero<F: Real>() -> C<F> {
    C::new(F::zero(), F::zero())
}

fn trim<F: Real>(mut p: Vec<C<F>>) -> Vec<C<F>> {
    while p.last().is_some_and(|c| *c == czero()) {
        p.pop();
    }
    p
}

/// Horner evaluation of `Σ p_k z^k`.
pub fn poly_eval<F: Real>(p: &[C<F>], z: C<F>) -> C<F> {
    p.iter().rev().fold(czero(), |acc, &c| acc * z + c)
}

/// Coefficients of `p(z0 + u)` in `u`.
pub fn taylor_shift<F: Real>(p: &[C<F>], z0: C<F>) -> Vec<C<F>> {
    let mut q = p.to_vec();
    let n = q.len();
    for i in 0..n {
        for k in (i..n - 1).rev() {
            let t = q[k + 1] * z0;
            q[k] = q[k] + t;
        }
    }
    q
}

/// First `terms` coefficients of `num / den` as a power series; `den[0] != 0`.
pub fn series_div<F: Real>(num: &[C<F>], den: &[C<F>], terms: usize) -> Vec<C<F>> {
    let mut out: Vec<C<F>> = Vec::with_capacity(terms);
    for k in 0..terms {
        let mut acc = num.get(k).copied().unwrap_or_else(czero);
        for i in 1..=k.min(den.len().saturating_sub(1)) {
            acc = acc - den[i] * out[k - i];
        }
        out.push(acc / den[0]);
    }
    out
}

/// All complex roots by Durand–Kerner iteration. Empty for constants.
pub fn poly_roots<F: Real>(p: &[C<F>]) -> Vec<C<F>> {
    let p = trim(p.to_vec());
    if p.len() <= 1 {
        return Vec::new();
    }
    let lead = *p.last().expect("nonempty");
    let monic: Vec<C<F>> = p.iter().map(|c| c / lead).collect();
    let deg = monic.len() - 1;
    let seed = C::new(F::lit(0.4), F::lit(0.9));
    let bound = F::one()
        + monic[..deg].iter().map(|c| c.norm()).fold(F::zero(), F::max);
    let mut roots: Vec<C<F>> = (0..deg).map(|k| seed.powu(k as u32) * bound).collect();
    for _ in 0..1000 {
        let mut moved = F::zero();
        for i in 0..deg {
            let zi = roots[i];
            let mut den = C::new(F::one(), F::zero());
            for (j, zj) in roots.iter().enumerate() {
                if j != i {
                    den = den * (zi - zj);
                }
            }
            if den == czero() {
                continue;
            }
            let step = poly_eval(&monic, zi) / den;
            roots[i] = zi - step;
            moved = moved.max(step.norm());
        }
        if moved <= F::epsilon() * bound {
            break;
        }
    }
    roots
}

/// `num(z) / den(z)` with complex polynomial parts.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalEntry<F: Real> {
    num: Vec<C<F>>,
    den: Vec<C<F>>,
}

impl<F: Real> RationalEntry<F> {
    pub fn new(num: Vec<C<F>>, den: Vec<C<F>>) -> Result<Self, DFiniteError> {
        let den = trim(den);
        if den.is_empty() {
            return Err(DFiniteError::InvalidSystem("zero denominator in matrix entry".into()));
        }
        Ok(RationalEntry { num: trim(num), den })
    }

    pub fn polynomial(num: Vec<C<F>>) -> Self {
        RationalEntry {
            num: trim(num),
            den: vec![C::new(F::one(), F::zero())],
        }
    }

    pub fn constant(c: C<F>) -> Self {
        Self::polynomial(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn eval(&self, z: C<F>) -> C<F> {
        poly_eval(&self.num, z) / poly_eval(&self.den, z)
    }

    /// Taylor coefficients at `z0`, which must not be a root of the denominator.
    pub fn taylor(&self, z0: C<F>, terms: usize) -> Vec<C<F>> {
        if self.is_zero() {
            return vec![czero(); terms];
        }
        series_div(&taylor_shift(&self.num, z0), &taylor_shift(&self.den, z0), terms)
    }

    pub fn poles(&self) -> Vec<C<F>> {
        poly_roots(&self.den)
    }
}

/// Square matrix of rational entries, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalMatrix<F: Real> {
    dim: usize,
    entries: Vec<RationalEntry<F>>,
}

impl<F: Real> RationalMatrix<F> {
    pub fn new(dim: usize, entries: Vec<RationalEntry<F>>) -> Result<Self, DFiniteError> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(DFiniteError::InvalidSystem(format!(
                "need {} entries for dimension {dim}, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(RationalMatrix { dim, entries })
    }

    pub fn constant(rows: &[Vec<C<F>>]) -> Result<Self, DFiniteError> {
        let entries = rows.iter().flatten().map(|&c| RationalEntry::constant(c)).collect();
        Self::new(rows.len(), entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> &RationalEntry<F> {
        &self.entries[i * self.dim + j]
    }

    pub fn eval(&self, z: C<F>) -> Vec<C<F>> {
        self.entries.iter().map(|e| e.eval(z)).collect()
    }

    /// `A_l` for `l < terms`, each row-major.
    pub fn taylor(&self, z0: C<F>, terms: usize) -> Vec<Vec<C<F>>> {
        let per_entry: Vec<Vec<C<F>>> = self.entries.iter().map(|e| e.taylor(z0, terms)).collect();
        (0..terms)
            .map(|l| per_entry.iter().map(|t| t[l]).collect())
            .collect()
    }

    /// Roots of all entry denominators.
    pub fn poles(&self) -> Vec<C<F>> {
        self.entries.iter().filter(|e| !e.is_zero()).flat_map(|e| e.poles()).collect()
    }
}

/// `y' = A(z) y` with `y(start) = initial`, `A` holomorphic on `|z - center| < radius`.
#[derive(Clone, Debug, PartialEq)]
pub struct OdeSystem<F: Real> {
    matrix: RationalMatrix<F>,
    start: C<F>,
    initial: Vec<C<F>>,
    center: C<F>,
    radius: F,
    poles: Vec<C<F>>,
}

impl<F: Real> OdeSystem<F> {
    pub fn new(
        matrix: RationalMatrix<F>,
        start: C<F>,
        initial: Vec<C<F>>,
        center: C<F>,
        radius: F,
    ) -> Result<Self, DFiniteError> {
        if !(radius > F::zero()) {
            return Err(DFiniteError::InvalidSystem("disc radius must be positive".into()));
        }
        if initial.len() != matrix.dim() {
            return Err(DFiniteError::InvalidSystem(format!(
                "initial vector has length {}, system has dimension {}",
                initial.len(),
                matrix.dim()
            )));
        }
        if !((start - center).norm() < radius) {
            return Err(DFiniteError::PathOutsideDomain { vertex: 0 });
        }
        let poles = matrix.poles();
        Ok(OdeSystem {
            matrix,
            start,
            initial,
            center,
            radius,
            poles,
        })
    }

    /// Same system, new initial vector at the same start point.
    pub fn with_initial(mut self, initial: Vec<C<F>>) -> Result<Self, DFiniteError> {
        if initial.len() != self.dim() {
            return Err(DFiniteError::InvalidSystem("initial vector length mismatch".into()));
        }
        self.initial = initial;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &RationalMatrix<F> {
        &self.matrix
    }

    pub fn start(&self) -> C<F> {
        self.start
    }

    pub fn initial(&self) -> &[C<F>] {
        &self.initial
    }

    pub fn radius(&self) -> F {
        self.radius
    }

    pub fn center(&self) -> C<F> {
        self.center
    }

    /// Distance from `z` to the nearest pole of `A` (infinite if none).
    pub fn pole_distance(&self, z: C<F>) -> F {
        self.poles.iter().map(|p| (p - z).norm()).fold(F::infinity(), F::min)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ContinueOptions<F: Real> {
    /// Accept a step when full and two-half-step results agree to this (relative to `max(1, |y|)`).
    pub target: F,
    pub max_degree: usize,
    /// Fraction of the pole distance a step may cover.
    pub radius_fraction: F,
    pub max_step: Option<F>,
    /// Uniform steps of exactly this Taylor degree, no acceptance test.
    pub fixed_degree: Option<usize>,
}

impl<F: Real> Default for ContinueOptions<F> {
    fn default() -> Self {
        ContinueOptions {
            target: F::lit(1e-10).max(F::epsilon() * F::lit(64.0)),
            max_degree: 60,
            radius_fraction: F::lit(0.35),
            max_step: None,
            fixed_degree: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Continuation<F: Real> {
    #[serde(skip)]
    pub end: Vec<C<F>>,
    pub steps: usize,
    /// Largest step-halving residual seen.
    pub max_residual: F,
    pub max_degree_used: usize,
}

fn norm_inf<F: Real>(v: &[C<F>]) -> F {
    v.iter().map(|c| c.norm()).fold(F::zero(), F::max)
}

/// One Taylor step of length `h` from `(z0, y0)`. With `fixed`, exactly that
/// many terms are summed; otherwise terms stop once two in a row are negligible.
fn taylor_step<F: Real>(a: &[Vec<C<F>>], dim: usize, y0: &[C<F>], h: C<F>, fixed: Option<usize>) -> (Vec<C<F>>, usize) {
    let max_deg = fixed.unwrap_or(a.len() - 1).min(a.len() - 1);
    let scale = norm_inf(y0).max(F::one());
    let tiny = F::epsilon() * scale * F::lit(0.01);
    let mut ys: Vec<Vec<C<F>>> = vec![y0.to_vec()];
    let mut sum = y0.to_vec();
    let mut hk = C::new(F::one(), F::zero());
    let mut quiet = 0;
    let mut used = 0;
    for k in 0..max_deg {
        let mut next = vec![czero::<F>(); dim];
        for (l, al) in a.iter().enumerate().take(k + 1) {
            let y = &ys[k - l];
            for i in 0..dim {
                let mut acc = czero();
                for j in 0..dim {
                    acc = acc + al[i * dim + j] * y[j];
                }
                next[i] = next[i] + acc;
            }
        }
        let div = F::from_usize_lossy(k + 1);
        for c in next.iter_mut() {
            *c = *c / div;
        }
        hk = hk * h;
        let term: Vec<C<F>> = next.iter().map(|c| c * hk).collect();
        for (s, t) in sum.iter_mut().zip(&term) {
            *s = *s + t;
        }
        ys.push(next);
        used = k + 1;
        if fixed.is_none() {
            quiet = if norm_inf(&term) <= tiny { quiet + 1 } else { 0 };
            if quiet >= 2 && k >= 3 {
                break;
            }
        }
    }
    (sum, used)
}

/// Continues the solution along a polyline starting at the system's start point.
pub fn ode_continue<F: Real>(
    sys: &OdeSystem<F>,
    path: &[C<F>],
    opts: &ContinueOptions<F>,
) -> Result<Continuation<F>, DFiniteError> {
    let Some(first) = path.first() else {
        return Err(DFiniteError::InvalidPath("empty path".into()));
    };
    let scale = sys.radius.min(F::one()).max(F::epsilon());
    if (*first - sys.start).norm() > F::epsilon() * F::lit(16.0) * scale.max(sys.start.norm()) {
        return Err(DFiniteError::InvalidPath("path must begin at the initial point".into()));
    }
    for (i, v) in path.iter().enumerate() {
        if !((v - sys.center).norm() < sys.radius) {
            return Err(DFiniteError::PathOutsideDomain { vertex: i });
        }
    }
    let dim = sys.dim();
    let terms = opts.fixed_degree.map_or(opts.max_degree, |d| d) + 1;
    let mut y = sys.initial.clone();
    let mut out = Continuation {
        end: Vec::new(),
        steps: 0,
        max_residual: F::zero(),
        max_degree_used: 0,
    };
    let at_fault = |z: C<F>, r: F| DFiniteError::StepFailure {
        at: [z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN)],
        residual: r.to_f64().unwrap_or(f64::NAN),
    };

    for seg in path.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let len = (b - a).norm();
        if len == F::zero() {
            continue;
        }
        let dir = (b - a) / len;

        if let Some(p) = opts.fixed_degree {
            let h_max = opts.max_step.unwrap_or(len);
            let count = (len / h_max).ceil().to_usize().unwrap_or(1).max(1);
            let h = dir * (len / F::from_usize_lossy(count));
            for i in 0..count {
                let z = a + h * F::from_usize_lossy(i);
                if sys.pole_distance(z) <= h.norm() {
                    return Err(at_fault(z, F::infinity()));
                }
                let coeffs = sys.matrix.taylor(z, terms);
                let (full, used) = taylor_step(&coeffs, dim, &y, h, Some(p));
                let half = h / F::lit(2.0);
                let (mid, _) = taylor_step(&coeffs, dim, &y, half, Some(p));
                let coeffs_mid = sys.matrix.taylor(z + half, terms);
                let (two, _) = taylor_step(&coeffs_mid, dim, &mid, half, Some(p));
                let res = diff(&full, &two);
                out.max_residual = out.max_residual.max(res);
                out.max_degree_used = out.max_degree_used.max(used);
                out.steps += 1;
                y = full;
            }
            continue;
        }

        let mut t = F::zero();
        while t < len {
            let z = a + dir * t;
            let rho = sys.pole_distance(z);
            let mut h = (len - t).min(opts.radius_fraction * rho);
            if let Some(m) = opts.max_step {
                h = h.min(m);
            }
            if !(h > F::epsilon() * len) {
                return Err(at_fault(z, F::infinity()));
            }
            let coeffs = sys.matrix.taylor(z, terms);
            let mut accepted = false;
            let mut last_res = F::infinity();
            for _ in 0..40 {
                let step = dir * h;
                let half = step / F::lit(2.0);
                let (full, used) = taylor_step(&coeffs, dim, &y, step, None);
                let (mid, _) = taylor_step(&coeffs, dim, &y, half, None);
                let coeffs_mid = sys.matrix.taylor(z + half, terms);
                let (two, used2) = taylor_step(&coeffs_mid, dim, &mid, half, None);
                last_res = diff(&full, &two);
                if last_res <= opts.target {
                    y = two;
                    t = if len - t - h <= F::epsilon() * len { len } else { t + h };
                    out.steps += 1;
                    out.max_residual = out.max_residual.max(last_res);
                    out.max_degree_used = out.max_degree_used.max(used).max(used2);
                    accepted = true;
                    break;
                }
                h = h / F::lit(2.0);
            }
            if !accepted {
                return Err(at_fault(z, last_res));
            }
        }
    }
    out.end = y;
    Ok(out)
}

fn diff<F: Real>(a: &[C<F>], b: &[C<F>]) -> F {
    let d: Vec<C<F>> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm_inf(&d) / norm_inf(b).max(F::one())
}

/// First-order companion system in `w` for `Σ_i q_i(z, w) ∂_w^i f = 0` at fixed `z`:
/// `y_i' = y_{i+1}` for `i < s`, `y_s' = -(q_{s-1} y_s + … + q_0 y_1) / q_s`.
///
/// The disc is centered at `w = 0` with radius the smallest root modulus of
/// `q_s(z, ·)`. The initial vector is `e_1`; use [`OdeSystem::with_initial`]
/// to supply `(f, f_w, …, ∂_w^{s-1} f)` at `w = 0`.
pub fn companion_system<F: Real>(q: &[BiPoly], z: C<F>) -> Result<OdeSystem<F>, DFiniteError> {
    let s = q
        .iter()
        .rposition(|p| !p.is_zero())
        .ok_or(DFiniteError::DegenerateEquation)?;
    if s == 0 {
        return Err(DFiniteError::InvalidSystem("equation has no derivative term".into()));
    }
    let lead = trim(q[s].at_z(z));
    let lead_at_0 = lead.first().copied().unwrap_or_else(czero);
    let size = norm_inf(&lead).max(F::min_positive_value());
    if lead_at_0.norm() <= F::epsilon() * F::lit(16.0) * size {
        return Err(DFiniteError::LeadingCoeffVanishes);
    }
    let radius = poly_roots(&lead).iter().map(|r| r.norm()).fold(F::infinity(), F::min);
    let mut entries = Vec::with_capacity(s * s);
    for i in 0..s {
        for (j, qj) in q.iter().enumerate().take(s) {
            let e = if i + 1 < s {
                if j == i + 1 {
                    RationalEntry::constant(C::new(F::one(), F::zero()))
                } else {
                    RationalEntry::polynomial(vec![])
                }
            } else {
                let num: Vec<C<F>> = qj.at_z(z).into_iter().map(|c| -c).collect();
                RationalEntry::new(num, lead.clone())?
            };
            entries.push(e);
        }
    }
    let mut e1 = vec![czero(); s];
    e1[0] = C::new(F::one(), F::zero());
    OdeSystem::new(RationalMatrix::new(s, entries)?, czero(), e1, czero(), radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::IntPoly;
    use std::f64::consts::FRAC_PI_2;

    type Z = C<f64>;

    fn re(x: f64) -> Z {
        Z::new(x, 0.0)
    }

    fn scalar(entry: RationalEntry<f64>, y0: f64, radius: f64) -> OdeSystem<f64> {
        OdeSystem::new(RationalMatrix::new(1, vec![entry]).unwrap(), re(0.0), vec![re(y0)], re(0.0), radius).unwrap()
    }

    #[test]
    fn helpers() {
        let p = vec![re(1.0), re(2.0), re(3.0)];
        let s = taylor_shift(&p, re(2.0));
        assert_eq!(s, vec![re(17.0), re(14.0), re(3.0)]);
        let d = series_div(&[re(1.0)], &[re(1.0), re(-1.0)], 4);
        assert_eq!(d, vec![re(1.0); 4]);
        let mut roots = poly_roots(&[re(2.0), re(-3.0), re(1.0)]);
        roots.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((roots[0] - re(1.0)).norm() < 1e-12 && (roots[1] - re(2.0)).norm() < 1e-12);
    }

    #[test]
    fn exponential() {
        let sys = scalar(RationalEntry::constant(re(1.0)), 1.0, f64::INFINITY);
        let r = ode_continue(&sys, &[re(0.0), re(1.0)], &ContinueOptions::default()).unwrap();
        assert!((r.end[0] - re(std::f64::consts::E)).norm() < 1e-10, "{:?}", r.end);
        assert!(r.max_residual <= 1e-10);
    }

    #[test]
    fn rotation() {
        let a = RationalMatrix::constant(&[vec![re(0.0), re(-1.0)], vec![re(1.0), re(0.0)]]).unwrap();
        let sys = OdeSystem::new(a, re(0.0), vec![re(1.0), re(0.0)], re(0.0), f64::INFINITY).unwrap();
        let r = ode_continue(&sys, &[re(0.0), re(FRAC_PI_2)], &ContinueOptions::default()).unwrap();
        assert!((r.end[0] - re(0.0)).norm() < 1e-9);
        assert!((r.end[1] - re(1.0)).norm() < 1e-9);
    }

    #[test]
    fn zero_matrix_is_identity_flow() {
        let sys = scalar(RationalEntry::polynomial(vec![]), 3.5, 2.0);
        let r = ode_continue(&sys, &[re(0.0), Z::new(0.5, 1.0), re(-1.0)], &ContinueOptions::default()).unwrap();
        assert_eq!(r.end, vec![re(3.5)]);
    }

    #[test]
    fn path_independence_near_pole() {
        // y' = y/(1-z), y = 1/(1-z), pole at 1
        let e = RationalEntry::new(vec![re(1.0)], vec![re(1.0), re(-1.0)]).unwrap();
        let sys = scalar(e, 1.0, 1.0);
        let end = Z::new(0.6, 0.6);
        let opts = ContinueOptions::default();
        let a = ode_continue(&sys, &[re(0.0), re(0.6), end], &opts).unwrap();
        let b = ode_continue(&sys, &[re(0.0), Z::new(-0.3, 0.5), end], &opts).unwrap();
        assert!((a.end[0] - b.end[0]).norm() < 1e-8);
        let exact = re(1.0) / (re(1.0) - end);
        assert!((a.end[0] - exact).norm() < 1e-9);
    }

    #[test]
    fn domain_errors() {
        let e = RationalEntry::new(vec![re(1.0)], vec![re(1.0), re(-1.0)]).unwrap();
        let sys = scalar(e, 1.0, 1.0);
        let opts = ContinueOptions::default();
        assert_eq!(
            ode_continue(&sys, &[re(0.0), re(1.2)], &opts).unwrap_err(),
            DFiniteError::PathOutsideDomain { vertex: 1 }
        );
        assert!(matches!(ode_continue(&sys, &[re(0.1)], &opts), Err(DFiniteError::InvalidPath(_))));
    }

    #[test]
    fn fixed_degree_order() {
        let sys = scalar(RationalEntry::constant(re(1.0)), 1.0, f64::INFINITY);
        let err = |h: f64| {
            let opts = ContinueOptions {
                fixed_degree: Some(4),
                max_step: Some(h),
                ..Default::default()
            };
            let r = ode_continue(&sys, &[re(0.0), re(1.0)], &opts).unwrap();
            (r.end[0] - re(std::f64::consts::E)).norm()
        };
        let (e1, e2) = (err(0.2), err(0.1));
        assert!(e1 / e2 >= 8.0, "{e1} {e2}");
    }

    #[test]
    fn companion() {
        let bp = |rows: &[&[i64]]| BiPoly::new(rows.iter().map(|r| IntPoly::from_i64s(r)).collect());
        // (1 - w) f_w - f = 0 gives y' = y / (1 - w)
        let sys = companion_system::<f64>(&[bp(&[&[-1]]), bp(&[&[1, -1]])], Z::new(0.3, 0.1)).unwrap();
        assert_eq!(sys.dim(), 1);
        assert!((sys.radius() - 1.0).abs() < 1e-12);
        let w = Z::new(0.4, 0.2);
        assert!((sys.matrix().eval(w)[0] - re(1.0) / (re(1.0) - w)).norm() < 1e-14);

        let sys = companion_system::<f64>(&[bp(&[]), bp(&[]), bp(&[&[1]])], re(0.0)).unwrap();
        let a = sys.matrix().eval(re(0.7));
        assert_eq!(a, vec![re(0.0), re(1.0), re(0.0), re(0.0)]);
        assert_eq!(sys.radius(), f64::INFINITY);

        // q_1 = w vanishes at the center
        assert_eq!(
            companion_system::<f64>(&[bp(&[&[-1]]), bp(&[&[0, 1]])], re(0.5)).unwrap_err(),
            DFiniteError::LeadingCoeffVanishes
        );
        // q_1 = z - w vanishes at w = 0 when z = 0
        assert_eq!(
            companion_system::<f64>(&[bp(&[&[-1]]), bp(&[&[0, -1], &[1]])], re(0.0)).unwrap_err(),
            DFiniteError::LeadingCoeffVanishes
        );
    }
}
