//! Steady-state covariance matrix from M V + V M^T = -D.

use nalgebra::DMatrix;

use crate::dynamics::{DiffusionMatrix, DriftMatrix};
use crate::error::{Error, Result};
use crate::stability::{eigenvalues, is_stable};
use crate::Matrix8;

/// Relative residual bound checked on every solve.
pub const RESIDUAL_TOL: f64 = 1e-8;
const PIVOT_TOL: f64 = 1e-14;
const SYMPLECTIC_TOL: f64 = 1e-6;

/// Symmetric 8x8 covariance matrix of the quadrature fluctuations,
/// V_ij = <U_i U_j + U_j U_i> / 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix(pub Matrix8);

impl CovarianceMatrix {
    /// Wraps `(v + v^T) / 2`.
    pub fn symmetrized(v: Matrix8) -> Self {
        Self((v + v.transpose()) * 0.5)
    }
}

/// ‖M V + V M^T + D‖_max.
pub fn lyapunov_residual(m: &Matrix8, d: &Matrix8, v: &Matrix8) -> f64 {
    (m * v + v * m.transpose() + d).amax()
}

/// Solves the Lyapunov equation for a stable drift matrix.
///
/// The equation is vectorized with the Kronecker sum
/// `(I ⊗ M + M ⊗ I) vec(V) = -vec(D)` and solved by LU with partial pivoting.
pub fn solve_lyapunov(m: &DriftMatrix, d: &DiffusionMatrix) -> Result<CovarianceMatrix> {
    let report = is_stable(&m.0)?;
    if !report.stable {
        return Err(Error::UnstableDrift {
            margin: report.margin,
        });
    }
    solve_lyapunov_unchecked(&m.0, &d.0)
}

/// Same as [`solve_lyapunov`] without the stability re-check. Still fails on
/// a singular Kronecker system or an excessive residual.
pub fn solve_lyapunov_unchecked(m: &Matrix8, d: &Matrix8) -> Result<CovarianceMatrix> {
    let mm = DMatrix::from_column_slice(8, 8, m.as_slice());
    let eye = DMatrix::<f64>::identity(8, 8);
    let kron = eye.kronecker(&mm) + mm.kronecker(&eye);
    let scale = kron.amax();

    let lu = kron.lu();
    let pivot = lu
        .u()
        .diagonal()
        .iter()
        .fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
    if pivot.is_nan() || pivot <= PIVOT_TOL * scale {
        return Err(Error::SingularSystem { pivot, scale });
    }
    let rhs = nalgebra::DVector::from_iterator(64, d.as_slice().iter().map(|x| -x));
    let sol = lu
        .solve(&rhs)
        .ok_or(Error::SingularSystem { pivot, scale })?;

    let v = CovarianceMatrix::symmetrized(Matrix8::from_column_slice(sol.as_slice()));
    let residual = lyapunov_residual(m, d, &v.0);
    let bound = RESIDUAL_TOL * d.amax().max(1.0);
    if residual.is_nan() || residual > bound {
        return Err(Error::ResidualTooLarge { residual, bound });
    }
    Ok(v)
}

/// Symplectic form with one [[0, 1], [-1, 0]] block per mode.
pub fn symplectic_form() -> Matrix8 {
    let mut omega = Matrix8::zeros();
    for k in 0..4 {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Symplectic eigenvalues of `v`, ascending. They are the moduli of the
/// eigenvalues of Omega V, which come in pairs +/- i nu.
pub fn symplectic_eigenvalues(v: &CovarianceMatrix) -> Result<[f64; 4]> {
    let ev = eigenvalues(&(symplectic_form() * v.0))?;
    let size = ev.iter().fold(f64::MIN_POSITIVE, |m, z| m.max(z.norm()));
    let deviation = ev.iter().fold(0.0f64, |m, z| m.max(z.re.abs())) / size;
    if deviation > SYMPLECTIC_TOL {
        return Err(Error::NotSymplecticSpectrum { deviation });
    }
    let mut moduli: Vec<f64> = ev.iter().map(|z| z.im.abs()).collect();
    moduli.sort_by(f64::total_cmp);
    Ok([
        0.5 * (moduli[0] + moduli[1]),
        0.5 * (moduli[2] + moduli[3]),
        0.5 * (moduli[4] + moduli[5]),
        0.5 * (moduli[6] + moduli[7]),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(values: [f64; 8]) -> Matrix8 {
        Matrix8::from_diagonal(&nalgebra::SVector::<f64, 8>::from_column_slice(&values))
    }

    #[test]
    fn negative_identity_drift() {
        let v = solve_lyapunov(
            &DriftMatrix(-Matrix8::identity()),
            &DiffusionMatrix(Matrix8::identity()),
        )
        .unwrap();
        assert!((v.0 - Matrix8::identity() * 0.5).amax() < 1e-15);
    }

    #[test]
    fn decoupled_scalar_equations() {
        let rates = [0.5, 1.0, 2.0, 3.0, 0.1, 7.0, 0.25, 4.0];
        let noise = [0.0, 1.0, 2.0, 0.3, 0.01, 5.0, 1.5, 0.2];
        let v = solve_lyapunov(&DriftMatrix(-diag(rates)), &DiffusionMatrix(diag(noise))).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let want = if i == j {
                    noise[i] / (2.0 * rates[i])
                } else {
                    0.0
                };
                assert!((v.0[(i, j)] - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn unstable_drift_rejected() {
        let r = solve_lyapunov(
            &DriftMatrix(Matrix8::identity()),
            &DiffusionMatrix(Matrix8::identity()),
        );
        assert!(matches!(r, Err(Error::UnstableDrift { .. })));
    }

    #[test]
    fn singular_kronecker_sum() {
        // eigenvalues +1 and -1 sum to zero
        let m = diag([1.0, -1.0, -1.0, -1.0, -1.0, -1.0, -1.0, -1.0]);
        let r = solve_lyapunov_unchecked(&m, &Matrix8::identity());
        assert!(matches!(r, Err(Error::SingularSystem { .. })));
    }

    #[test]
    fn vacuum_and_scaled_symplectic_spectrum() {
        let nu = symplectic_eigenvalues(&CovarianceMatrix(Matrix8::identity() * 0.5)).unwrap();
        assert!(nu.iter().all(|v| (v - 0.5).abs() < 1e-14));
        let nu = symplectic_eigenvalues(&CovarianceMatrix(Matrix8::identity())).unwrap();
        assert!(nu.iter().all(|v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn thermal_modes_sorted() {
        let v = CovarianceMatrix(diag([2.5, 2.5, 0.5, 0.5, 1.5, 1.5, 3.0, 3.0]));
        let nu = symplectic_eigenvalues(&v).unwrap();
        let want = [0.5, 1.5, 2.5, 3.0];
        for k in 0..4 {
            assert!((nu[k] - want[k]).abs() < 1e-13);
        }
    }

    #[test]
    fn squeezed_single_mode_is_pure() {
        let r: f64 = 0.7;
        let v = CovarianceMatrix(diag([
            0.5 * (2.0 * r).exp(),
            0.5 * (-2.0 * r).exp(),
            0.5,
            0.5,
            0.5,
            0.5,
            0.5,
            0.5,
        ]));
        let nu = symplectic_eigenvalues(&v).unwrap();
        assert!(nu.iter().all(|v| (v - 0.5).abs() < 1e-13));
    }

    #[test]
    fn non_symplectic_spectrum_rejected() {
        // negative-definite "covariance": Omega V then has a real spectrum
        let mut m = Matrix8::identity() * 0.5;
        m[(0, 0)] = -1.0;
        assert!(matches!(
            symplectic_eigenvalues(&CovarianceMatrix(m)),
            Err(Error::NotSymplecticSpectrum { .. })
        ));
    }
}
