//! Independent checks of a computed point against the nonlinear mean-field
//! flow and against the defining equations.

use std::fmt;

use crate::dynamics::{default_dt, MeanField};
use crate::entanglement::Convention;
use crate::error::{Error, Result};
use crate::lyapunov::{lyapunov_residual, symplectic_eigenvalues, RESIDUAL_TOL};
use crate::model::PhysicalParams;
use crate::sweep::{evaluate_detailed, PointDetail};

pub const JACOBIAN_TOL: f64 = 1e-5;
pub const SYMPLECTIC_FLOOR: f64 = 0.5 - 1e-8;
const MAX_ODE_TIME: f64 = 2e4;
const PERTURBATION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::Skipped => "skipped",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, pass: bool, detail: String) -> Self {
        let status = if pass {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        Self {
            name,
            status,
            detail,
        }
    }

    fn skipped(name: &'static str, why: &str) -> Self {
        Self {
            name,
            status: CheckStatus::Skipped,
            detail: why.to_string(),
        }
    }
}

/// Largest entrywise gap between the finite-difference Jacobian of the
/// mean-field flow and the drift matrix.
pub fn jacobian_mismatch(detail: &PointDetail) -> f64 {
    let flow = MeanField::with_bare_detuning(&detail.params, detail.state.delta0);
    let jac = flow.jacobian(&detail.state.mean_field_state());
    (jac - detail.drift.0).amax()
}

/// Ratio of the distance from the fixed point after the flow has run for
/// `time` to the initial distance, starting from a small perturbation.
/// Returns `None` when the trajectory overflows.
pub fn perturbation_growth(detail: &PointDetail, time: f64) -> Result<Option<f64>> {
    let flow = MeanField::with_bare_detuning(&detail.params, detail.state.delta0);
    let fixed = detail.state.mean_field_state();
    let mut init = fixed;
    for (k, v) in init.iter_mut().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        *v += sign * PERTURBATION * v.abs().max(1.0);
    }
    let dist = |x: &[f64; 8]| {
        x.iter()
            .zip(&fixed)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let dt = default_dt(&detail.drift);
    match flow.integrate(init, time.max(dt), dt) {
        Ok(end) => Ok(Some(dist(&end) / dist(&init))),
        Err(Error::NonFinite { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Time over which the linearized slowest mode changes by e^10, capped.
pub fn oracle_time(margin: f64) -> f64 {
    (10.0 / margin.abs().max(1e-12)).min(MAX_ODE_TIME)
}

pub fn run_oracle_suite(
    params: &PhysicalParams,
    convention: Convention,
) -> Result<Vec<CheckResult>> {
    let detail = evaluate_detailed(params, convention)?;
    let mut out = Vec::new();

    let gap = jacobian_mismatch(&detail);
    out.push(CheckResult::new(
        "jacobian_vs_drift",
        gap <= JACOBIAN_TOL,
        format!("max |J_fd - M| = {gap:e} (tol {JACOBIAN_TOL:e})"),
    ));

    match &detail.covariance {
        Some(v) => {
            let d = &detail.diffusion.0;
            let residual = lyapunov_residual(&detail.drift.0, d, &v.0);
            let bound = RESIDUAL_TOL * d.amax().max(1.0);
            out.push(CheckResult::new(
                "lyapunov_residual",
                residual <= bound,
                format!("residual {residual:e} (bound {bound:e})"),
            ));
        }
        None => out.push(CheckResult::skipped(
            "lyapunov_residual",
            "drift matrix unstable",
        )),
    }

    let margin = detail.stability.margin;
    let time = oracle_time(margin);
    let growth = perturbation_growth(&detail, time)?;
    let (pass, what) = match (detail.stability.stable, growth) {
        (true, Some(r)) => (
            r < 0.1,
            format!("stable: perturbation ratio {r:e} after t = {time}"),
        ),
        (true, None) => (false, "stable verdict but the flow overflowed".to_string()),
        (false, Some(r)) => (
            r > 10.0,
            format!("unstable: perturbation ratio {r:e} after t = {time}"),
        ),
        (false, None) => (true, "unstable: the flow diverged".to_string()),
    };
    out.push(CheckResult::new("mean_field_stability", pass, what));

    match &detail.covariance {
        Some(v) => {
            let nu = symplectic_eigenvalues(v)?;
            out.push(CheckResult::new(
                "symplectic_physicality",
                nu[0] >= SYMPLECTIC_FLOOR,
                format!("smallest symplectic eigenvalue {:.12}", nu[0]),
            ));
        }
        None => out.push(CheckResult::skipped(
            "symplectic_physicality",
            "no covariance matrix",
        )),
    }
    Ok(out)
}
