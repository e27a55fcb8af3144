//! Full pipeline at one point and over 1-D / 2-D parameter grids.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::dynamics::{build_diffusion, build_drift, DiffusionMatrix, DriftMatrix};
use crate::entanglement::{log_negativity, reduce_mechanical, Convention, EntanglementResult};
use crate::error::{Error, Result};
use crate::lyapunov::{solve_lyapunov, CovarianceMatrix};
use crate::model::{Detuning, PhysicalParams};
use crate::stability::StabilityReport;
use crate::steady_state::{steady_states, SteadyState};

/// Parameters that can label a sweep axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParam {
    OpaGain,
    OpaPhase,
    DriveE,
    LambdaHop,
    DeltaEff,
    NM,
    NA,
    Kappa,
    GammaM,
    G,
}

impl SweepParam {
    pub const ALL: [SweepParam; 10] = [
        Self::OpaGain,
        Self::OpaPhase,
        Self::DriveE,
        Self::LambdaHop,
        Self::DeltaEff,
        Self::NM,
        Self::NA,
        Self::Kappa,
        Self::GammaM,
        Self::G,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::OpaGain => "opa_gain",
            Self::OpaPhase => "opa_phase",
            Self::DriveE => "drive_E",
            Self::LambdaHop => "lambda_hop",
            Self::DeltaEff => "delta_eff",
            Self::NM => "n_m",
            Self::NA => "n_a",
            Self::Kappa => "kappa",
            Self::GammaM => "gamma_m",
            Self::G => "g",
        }
    }

    pub fn apply(self, p: &mut PhysicalParams, value: f64) {
        match self {
            Self::OpaGain => p.opa_gain = value,
            Self::OpaPhase => p.opa_phase = value,
            Self::DriveE => p.drive_e = value,
            Self::LambdaHop => p.lambda_hop = value,
            Self::DeltaEff => p.detuning = Detuning::Effective(value),
            Self::NM => p.n_m = value,
            Self::NA => p.n_a = value,
            Self::Kappa => p.kappa = value,
            Self::GammaM => p.gamma_m = value,
            Self::G => p.g = value,
        }
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown sweep parameter {s:?}"))
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Linearly spaced axis, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn new(param: SweepParam, start: f64, stop: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidParam {
                name: "count",
                value: count as f64,
                constraint: ">= 2",
            });
        }
        if !(start.is_finite() && stop.is_finite()) || start == stop {
            return Err(Error::InvalidParam {
                name: "stop",
                value: stop,
                constraint: "finite and != start",
            });
        }
        Ok(Self {
            param,
            start,
            stop,
            count,
        })
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.stop
        } else {
            self.start + (self.stop - self.start) * (i as f64 / (self.count - 1) as f64)
        }
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|i| self.value(i))
    }
}

/// Everything computed at one parameter point.
#[derive(Debug, Clone)]
pub struct PointDetail {
    pub params: PhysicalParams,
    pub state: SteadyState,
    pub drift: DriftMatrix,
    pub diffusion: DiffusionMatrix,
    pub stability: StabilityReport,
    /// Present only when the drift is stable.
    pub covariance: Option<CovarianceMatrix>,
    pub entanglement: Option<EntanglementResult>,
}

/// Compact per-point summary, one CSV row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointRecord {
    pub stable: bool,
    pub margin: f64,
    pub eta_minus: Option<f64>,
    pub e_n: Option<f64>,
    pub a_s_abs: f64,
}

impl PointDetail {
    pub fn record(&self) -> PointRecord {
        PointRecord {
            stable: self.stability.stable,
            margin: self.stability.margin,
            eta_minus: self.entanglement.map(|e| e.eta_minus),
            e_n: self.entanglement.map(|e| e.e_n),
            a_s_abs: self.state.a_s.norm(),
        }
    }
}

/// Runs steady state, drift/diffusion, stability and, for stable points,
/// the covariance solve and the negativity.
///
/// With a bare detuning the first linearly stable branch (lowest photon
/// number) is used, or the lowest branch when none is stable.
pub fn evaluate_detailed(params: &PhysicalParams, convention: Convention) -> Result<PointDetail> {
    let params = params.validate()?;
    let mut branches = steady_states(&params)?;
    let pick = branches
        .iter()
        .position(|b| b.stability.stable)
        .unwrap_or(0);
    let branch = branches.swap_remove(pick);
    let drift = build_drift(&params, &branch.state);
    let diffusion = build_diffusion(&params);
    let (covariance, entanglement) = if branch.stability.stable {
        let v = solve_lyapunov(&drift, &diffusion)?;
        let e = log_negativity(&reduce_mechanical(&v), convention)?;
        (Some(v), Some(e))
    } else {
        (None, None)
    };
    Ok(PointDetail {
        params,
        state: branch.state,
        drift,
        diffusion,
        stability: branch.stability,
        covariance,
        entanglement,
    })
}

pub fn evaluate_point(params: &PhysicalParams, convention: Convention) -> Result<PointRecord> {
    evaluate_detailed(params, convention).map(|d| d.record())
}

/// One grid cell: its coordinates and the pipeline outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub coords: Vec<f64>,
    pub outcome: std::result::Result<PointRecord, Error>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub axes: Vec<AxisSpec>,
    /// Row-major: the first axis is the outer loop.
    pub cells: Vec<Cell>,
    pub base: PhysicalParams,
    pub convention: Convention,
}

impl SweepResult {
    pub fn shape(&self) -> (usize, usize) {
        (self.axes[0].count, self.axes.get(1).map_or(1, |a| a.count))
    }

    pub fn cell(&self, i: usize, j: usize) -> &Cell {
        &self.cells[i * self.shape().1 + j]
    }
}

/// How cells are scheduled. Output ordering is by cell index either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    /// Rayon global pool.
    #[default]
    Parallel,
    /// Dedicated pool with this many threads.
    Threads(usize),
}

pub fn sweep(
    base: &PhysicalParams,
    axes: &[AxisSpec],
    convention: Convention,
    execution: Execution,
) -> Result<SweepResult> {
    if axes.is_empty() || axes.len() > 2 {
        return Err(Error::InvalidParam {
            name: "axes",
            value: axes.len() as f64,
            constraint: "1 or 2 axes",
        });
    }
    if axes.len() == 2 && axes[0].param == axes[1].param {
        return Err(Error::InvalidParam {
            name: "axis2",
            value: 2.0,
            constraint: "a parameter distinct from axis1",
        });
    }
    let inner = axes.get(1).map_or(1, |a| a.count);
    let total = axes[0].count * inner;

    let coords = |k: usize| -> Vec<f64> {
        let mut c = vec![axes[0].value(k / inner)];
        if let Some(ax) = axes.get(1) {
            c.push(ax.value(k % inner));
        }
        c
    };
    let eval = |k: usize| -> Cell {
        let c = coords(k);
        let mut p = *base;
        for (ax, v) in axes.iter().zip(&c) {
            ax.param.apply(&mut p, *v);
        }
        Cell {
            outcome: evaluate_point(&p, convention),
            coords: c,
        }
    };

    let cells: Vec<Cell> = match execution {
        Execution::Serial => (0..total).map(eval).collect(),
        Execution::Parallel => (0..total).into_par_iter().map(eval).collect(),
        Execution::Threads(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|_| Error::InvalidParam {
                    name: "threads",
                    value: n as f64,
                    constraint: "a usable thread count",
                })?;
            pool.install(|| (0..total).into_par_iter().map(eval).collect())
        }
    };
    Ok(SweepResult {
        axes: axes.to_vec(),
        cells,
        base: *base,
        convention,
    })
}
