#![allow(dead_code)]

use mirror_entanglement::Matrix8;
use nalgebra::SMatrix;
use num_complex::Complex64;

type CMatrix8 = SMatrix<Complex64, 8, 8>;

/// Roots of det(sI - m), obtained without touching the eigenvalue routine or
/// the trace recurrence: the determinant is sampled on a circle, the
/// coefficients recovered by an inverse DFT and the roots found by
/// Durand-Kerner iteration.
pub fn characteristic_roots(m: &Matrix8) -> Vec<Complex64> {
    let n = 8;
    let radius = m
        .row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(1.0, f64::max);
    let cm: CMatrix8 = m.map(|v| Complex64::new(v, 0.0));
    let nodes: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / n as f64))
        .collect();
    // q(s) = det(sI - M) - s^n, degree < n
    let q: Vec<Complex64> = nodes
        .iter()
        .map(|s| (CMatrix8::identity() * *s - cm).determinant() - s.powu(n as u32))
        .collect();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    for (j, c) in coeffs.iter_mut().enumerate().take(n) {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, qk) in q.iter().enumerate() {
            acc +=
                qk * Complex64::from_polar(1.0, -std::f64::consts::TAU * (j * k) as f64 / n as f64);
        }
        *c = acc / (n as f64 * radius.powi(j as i32));
    }
    // ascending coefficients -> evaluate
    let eval = |z: Complex64| {
        coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    };
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::new(0.4, 0.9).powu(k as u32) * radius)
        .collect();
    for _ in 0..2000 {
        let prev = z.clone();
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
        }
        let moved = z
            .iter()
            .zip(&prev)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if moved < 1e-15 * radius {
            break;
        }
    }
    z
}

fn expm_small(a: &Matrix8) -> Matrix8 {
    let mut term = Matrix8::identity();
    let mut sum = Matrix8::identity();
    for k in 1..30 {
        term = term * a / k as f64;
        sum += term;
    }
    sum
}

/// V(t) = integral_0^t e^{Ms} D e^{M^T s} ds, the solution of
/// dV/dt = M V + V M^T + D from V(0) = 0, propagated to `2^doublings * 2^-10`
/// by V(2t) = V(t) + e^{Mt} V(t) e^{M^T t}.
pub fn covariance_by_integration(m: &Matrix8, d: &Matrix8, doublings: u32) -> Matrix8 {
    let tau = 2f64.powi(-10);
    let mut phi = expm_small(&(m * tau));
    let steps = 64;
    let h = tau / steps as f64;
    let f = |v: &Matrix8| m * v + v * m.transpose() + d;
    let mut v = Matrix8::zeros();
    for _ in 0..steps {
        let k1 = f(&v);
        let k2 = f(&(v + k1 * (0.5 * h)));
        let k3 = f(&(v + k2 * (0.5 * h)));
        let k4 = f(&(v + k3 * h));
        v += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    for _ in 0..doublings {
        v = v + phi * v * phi.transpose();
        phi = phi * phi;
    }
    v
}
