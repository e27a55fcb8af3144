//! Asymptotic stability of the drift matrix.
//!
//! The verdict comes from the eigenvalues; a Routh-Hurwitz test on the
//! characteristic polynomial runs alongside as an independent check.

use nalgebra::Schur;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::Matrix8;

/// Margins at or above `-STABILITY_EPS` count as unstable.
pub const STABILITY_EPS: f64 = 1e-9;

/// Relative size below which a Routh-array pivot is treated as zero.
pub const ROUTH_PIVOT_EPS: f64 = 1e-12;

const SWEEPS_PER_EIGENVALUE: usize = 30;

/// Outcome of the Routh-Hurwitz cross-check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RouthCheck {
    Agrees,
    /// Routh-Hurwitz and the eigenvalues disagree; the eigenvalue verdict stands.
    Disagrees,
    /// A vanishing pivot made the array inconclusive.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub stable: bool,
    /// Largest real part over the spectrum.
    pub margin: f64,
    /// Sorted by descending real part, then descending imaginary part.
    pub eigenvalues: Vec<Complex64>,
    pub routh: RouthCheck,
}

/// Spectrum of a real 8x8 matrix via the real Schur form.
pub fn eigenvalues(m: &Matrix8) -> Result<Vec<Complex64>> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::ConvergenceFailure);
    }
    let schur = Schur::try_new(*m, f64::EPSILON, SWEEPS_PER_EIGENVALUE * 8)
        .ok_or(Error::ConvergenceFailure)?;
    let mut ev: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    Ok(ev)
}

/// Monic characteristic polynomial det(sI - m), highest power first,
/// by the Faddeev-LeVerrier trace recurrence.
pub fn characteristic_polynomial(m: &Matrix8) -> Vec<f64> {
    let n = 8;
    let mut coeffs = vec![1.0];
    let mut aux = Matrix8::zeros();
    let mut c_prev = 1.0;
    for k in 1..=n {
        aux = m * aux + Matrix8::identity() * c_prev;
        let c = -(m * aux).trace() / k as f64;
        coeffs.push(c);
        c_prev = c;
    }
    coeffs
}

/// Result of a Routh-Hurwitz array.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RouthOutcome {
    /// Number of first-column sign changes, i.e. roots in the open right half-plane.
    SignChanges(usize),
    Degenerate,
}

/// Routh array of a polynomial with positive leading coefficient,
/// highest power first.
pub fn routh_hurwitz(coeffs: &[f64]) -> RouthOutcome {
    let n = coeffs.len() - 1;
    let width = n / 2 + 1;
    let mut prev: Vec<f64> = coeffs.iter().step_by(2).copied().collect();
    let mut cur: Vec<f64> = coeffs.iter().skip(1).step_by(2).copied().collect();
    prev.resize(width, 0.0);
    cur.resize(width, 0.0);

    let row_scale = |r: &[f64]| r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut firsts = vec![prev[0]];
    for _ in 1..=n {
        let scale = row_scale(&prev).max(row_scale(&cur));
        if cur[0].abs() <= ROUTH_PIVOT_EPS * scale {
            return RouthOutcome::Degenerate;
        }
        firsts.push(cur[0]);
        let next: Vec<f64> = (0..width)
            .map(|j| {
                let a = prev.get(j + 1).copied().unwrap_or(0.0);
                let b = cur.get(j + 1).copied().unwrap_or(0.0);
                (cur[0] * a - prev[0] * b) / cur[0]
            })
            .collect();
        prev = std::mem::replace(&mut cur, next);
    }
    let changes = firsts
        .windows(2)
        .filter(|w| w[0].signum() != w[1].signum())
        .count();
    RouthOutcome::SignChanges(changes)
}

pub fn is_stable(m: &Matrix8) -> Result<StabilityReport> {
    let eigenvalues = eigenvalues(m)?;
    let margin = eigenvalues[0].re;
    let stable = margin < -STABILITY_EPS;
    let routh = match routh_hurwitz(&characteristic_polynomial(m)) {
        RouthOutcome::Degenerate => RouthCheck::Degenerate,
        RouthOutcome::SignChanges(c) if (c == 0) == stable => RouthCheck::Agrees,
        RouthOutcome::SignChanges(_) => RouthCheck::Disagrees,
    };
    Ok(StabilityReport {
        stable,
        margin,
        eigenvalues,
        routh,
    })
}
