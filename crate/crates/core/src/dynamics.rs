//! Linearized fluctuation dynamics and the nonlinear mean-field flow.
//!
//! Basis order for all 8x8 matrices:
//! (dq1, dp1, dq2, dp2, dx1, dy1, dx2, dy2), with cavity quadratures
//! dx = (da^+ + da)/sqrt(2) and dy = i(da^+ - da)/sqrt(2), so the vacuum
//! variance is 1/2.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Detuning, PhysicalParams};
use crate::steady_state::{steady_state_given_delta, steady_state_given_delta0, SteadyState};
use crate::Matrix8;

/// Drift matrix of the linearized quantum Langevin equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftMatrix(pub Matrix8);

/// Diffusion matrix of the delta-correlated noise sources.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionMatrix(pub Matrix8);

pub fn build_drift(params: &PhysicalParams, ss: &SteadyState) -> DriftMatrix {
    let gm = params.gamma_m;
    let (gx, gy) = (ss.g_x(), ss.g_y());
    let (sin, cos) = params.opa_phase.sin_cos();
    let squeeze_c = 2.0 * params.opa_gain * cos;
    let squeeze_s = 2.0 * params.opa_gain * sin;
    let k = params.kappa;
    let d = ss.delta_eff;
    let l = params.lambda_hop;

    #[rustfmt::skip]
    let m = Matrix8::from_row_slice(&[
        // mirrors
        0.0, 1.0, 0.0, 0.0,   0.0, 0.0, 0.0, 0.0,
        -1.0, -gm, 0.0, 0.0,  gx,  gy,  0.0, 0.0,
        0.0, 0.0, 0.0, 1.0,   0.0, 0.0, 0.0, 0.0,
        0.0, 0.0, -1.0, -gm,  0.0, 0.0, gx,  gy,
        // cavities
        -gy, 0.0, 0.0, 0.0,   -k + squeeze_c, d + squeeze_s,  0.0,            l,
        gx,  0.0, 0.0, 0.0,   -d + squeeze_s, -k - squeeze_c, -l,             0.0,
        0.0, 0.0, -gy, 0.0,   0.0,            l,              -k + squeeze_c, d + squeeze_s,
        0.0, 0.0, gx,  0.0,   -l,             0.0,            -d + squeeze_s, -k - squeeze_c,
    ]);
    DriftMatrix(m)
}

pub fn build_diffusion(params: &PhysicalParams) -> DiffusionMatrix {
    let mech = params.gamma_m * (2.0 * params.n_m + 1.0);
    let opt = params.kappa * (2.0 * params.n_a + 1.0);
    let diag =
        nalgebra::SVector::<f64, 8>::from_column_slice(&[0.0, mech, 0.0, mech, opt, opt, opt, opt]);
    DiffusionMatrix(Matrix8::from_diagonal(&diag))
}

/// Noise-free nonlinear equations of motion for the mean values.
///
/// State layout: (q1, p1, q2, p2, Re a1, Im a1, Re a2, Im a2).
#[derive(Debug, Clone, Copy)]
pub struct MeanField {
    params: PhysicalParams,
    delta0: f64,
}

impl MeanField {
    pub fn with_bare_detuning(params: &PhysicalParams, delta0: f64) -> Self {
        Self {
            params: *params,
            delta0,
        }
    }

    /// Uses the bare detuning implied by `params`. In effective-detuning mode
    /// this is delta + g q_s of the corresponding steady state; in bare mode
    /// it is the supplied value.
    pub fn new(params: &PhysicalParams) -> Result<Self> {
        let delta0 = match params.detuning {
            Detuning::Effective(d) => steady_state_given_delta(params, d)?.delta0,
            Detuning::Bare(d0) => d0,
        };
        Ok(Self::with_bare_detuning(params, delta0))
    }

    pub fn delta0(&self) -> f64 {
        self.delta0
    }

    pub fn rhs(&self, s: &[f64; 8]) -> [f64; 8] {
        let p = &self.params;
        let a1 = Complex64::new(s[4], s[5]);
        let a2 = Complex64::new(s[6], s[7]);
        let pump = Complex64::from_polar(2.0 * p.opa_gain, p.opa_phase);
        let loss = Complex64::new(p.kappa, self.delta0);
        let i = Complex64::i();
        let cavity = |a: Complex64, q: f64, other: Complex64| {
            -loss * a + i * p.g * q * a + p.drive_e + pump * a.conj() - i * p.lambda_hop * other
        };
        let da1 = cavity(a1, s[0], a2);
        let da2 = cavity(a2, s[2], a1);
        [
            s[1],
            -s[0] - p.gamma_m * s[1] + p.g * a1.norm_sqr(),
            s[3],
            -s[2] - p.gamma_m * s[3] + p.g * a2.norm_sqr(),
            da1.re,
            da1.im,
            da2.re,
            da2.im,
        ]
    }

    pub fn rk4_step(&self, s: &[f64; 8], dt: f64) -> [f64; 8] {
        let axpy = |x: &[f64; 8], h: f64, k: &[f64; 8]| {
            let mut out = *x;
            out.iter_mut().zip(k).for_each(|(o, k)| *o += h * k);
            out
        };
        let k1 = self.rhs(s);
        let k2 = self.rhs(&axpy(s, 0.5 * dt, &k1));
        let k3 = self.rhs(&axpy(s, 0.5 * dt, &k2));
        let k4 = self.rhs(&axpy(s, dt, &k3));
        let mut out = *s;
        for j in 0..8 {
            out[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        out
    }

    /// Integrates to `t_max`, calling `visit` after every step.
    pub fn integrate_with(
        &self,
        init: [f64; 8],
        t_max: f64,
        dt: f64,
        mut visit: impl FnMut(f64, &[f64; 8]),
    ) -> Result<[f64; 8]> {
        if !(dt > 0.0 && t_max >= dt) {
            return Err(Error::InvalidParam {
                name: "dt",
                value: dt,
                constraint: "> 0 and <= t_max",
            });
        }
        let steps = (t_max / dt).ceil() as usize;
        let h = t_max / steps as f64;
        let mut s = init;
        for n in 1..=steps {
            s = self.rk4_step(&s, h);
            let t = n as f64 * h;
            if s.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { time: t });
            }
            visit(t, &s);
        }
        Ok(s)
    }

    pub fn integrate(&self, init: [f64; 8], t_max: f64, dt: f64) -> Result<[f64; 8]> {
        self.integrate_with(init, t_max, dt, |_, _| {})
    }

    /// Central finite-difference Jacobian of the flow, expressed in the
    /// quadrature basis of [`DriftMatrix`].
    pub fn jacobian(&self, at: &[f64; 8]) -> Matrix8 {
        let mut jac = Matrix8::zeros();
        // one step per oscillator, scaled to its amplitude
        let size = |k: usize| at[k & !1].hypot(at[k | 1]).max(1.0);
        for col in 0..8 {
            let h = 1e-6 * size(col);
            let mut up = *at;
            let mut down = *at;
            up[col] += h;
            down[col] -= h;
            let (fu, fd) = (self.rhs(&up), self.rhs(&down));
            let width = up[col] - down[col];
            for row in 0..8 {
                jac[(row, col)] = (fu[row] - fd[row]) / width;
            }
        }
        // optical coordinates are Re a, Im a; quadratures are sqrt(2) times that
        let scale = |k: usize| {
            if k >= 4 {
                std::f64::consts::SQRT_2
            } else {
                1.0
            }
        };
        Matrix8::from_fn(|r, c| jac[(r, c)] * scale(r) / scale(c))
    }
}

/// Time series of the mean-field flow, one sample per step (initial state
/// included).
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<[f64; 8]>,
}

pub fn mean_field_trajectory(
    params: &PhysicalParams,
    init: [f64; 8],
    t_max: f64,
    dt: f64,
) -> Result<Trajectory> {
    let flow = MeanField::new(params)?;
    let mut times = vec![0.0];
    let mut states = vec![init];
    flow.integrate_with(init, t_max, dt, |t, s| {
        times.push(t);
        states.push(*s);
    })?;
    Ok(Trajectory { times, states })
}

/// Step size resolving the fastest linearized rate: 0.05 / max(1, |M|_inf).
pub fn default_dt(drift: &DriftMatrix) -> f64 {
    let norm = drift
        .0
        .row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(1.0, f64::max);
    0.05 / norm
}

/// Steady state whose mean-field fixed point the flow should reach: the
/// given-delta solution, or the first linearly stable bare-detuning branch.
pub fn reference_state(params: &PhysicalParams) -> Result<SteadyState> {
    match params.detuning {
        Detuning::Effective(d) => steady_state_given_delta(params, d),
        Detuning::Bare(d0) => {
            let branches = steady_state_given_delta0(params, d0)?;
            let pick = branches
                .iter()
                .find(|b| b.stability.stable)
                .unwrap_or(&branches[0]);
            Ok(pick.state)
        }
    }
}
