//! Reference implementations used as oracles by the acceptance suite.
//! They share no code with `ratcheck-core`.

use num_bigint::BigInt;
use num_traits::Zero;

/// Schoolbook product of integer polynomials (coefficient lists, low degree first).
pub fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

pub fn trim(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

/// Power-series coefficients of `p/q` through `order`, assuming `q[0] = ±1`.
pub fn series_of(p: &[BigInt], q: &[BigInt], order: usize) -> Vec<BigInt> {
    let q0 = &q[0];
    let mut a: Vec<BigInt> = Vec::with_capacity(order + 1);
    for n in 0..=order {
        let mut s = p.get(n).cloned().unwrap_or_default();
        for i in 1..q.len().min(n + 1) {
            s -= &q[i] * &a[n - i];
        }
        a.push(s * q0);
    }
    a
}

/// Length of the keyhole contour: outer arc, two radial segments, inner arc.
pub fn keyhole_length(phi: f64, psi: f64, s: f64, delta: f64) -> f64 {
    let r = 1.0 - delta;
    s * (phi - psi) + 2.0 * (s - r) + r * (std::f64::consts::TAU - (phi - psi))
}

/// `(L·M / (2π·η))^{m+1} / (m+1)! · ρ^{m(m+1)}` by direct multiplication.
pub fn bound_direct(l: f64, m_sup: f64, eta: f64, rho: f64, m: usize) -> f64 {
    let mut v = 1.0;
    for k in 1..=m + 1 {
        v *= l * m_sup / (std::f64::consts::TAU * eta) / k as f64;
    }
    v * rho.powi((m * (m + 1)) as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| x.into()).collect()
    }

    #[test]
    fn oracles() {
        assert_eq!(poly_mul(&b(&[1, -1]), &b(&[1, 1])), b(&[1, 0, -1]));
        assert_eq!(series_of(&b(&[1]), &b(&[1, -1, -1]), 6), b(&[1, 1, 2, 3, 5, 8, 13]));
        assert!((keyhole_length(1.0, -1.0, 1.0, 0.0) - std::f64::consts::TAU).abs() < 1e-15);
        assert!((bound_direct(1.0, 1.0, 1.0, 0.5, 1) - 0.5f64.powi(2) / (2.0 * std::f64::consts::TAU.powi(2))).abs() < 1e-15);
    }
}
