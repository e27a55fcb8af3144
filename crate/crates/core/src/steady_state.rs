//! Classical operating point of the driven cavities and mirrors.

use num_complex::Complex64;

use crate::dynamics::build_drift;
use crate::error::{Error, Result};
use crate::model::{Detuning, PhysicalParams};
use crate::stability::{is_stable, StabilityReport};

/// Smallest admissible |kappa^2 + (delta + lambda)^2 - 4 opa_gain^2|.
pub const DENOMINATOR_EPS: f64 = 1e-9;

const BISECTION_LIMIT: usize = 400;

/// Mean values shared by both cavities and both mirrors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    /// Intracavity amplitude.
    pub a_s: Complex64,
    /// Static mirror displacement, g |a_s|^2.
    pub q_s: f64,
    /// Static mirror momentum; always zero.
    pub p_s: f64,
    /// Effective detuning.
    pub delta_eff: f64,
    /// Bare detuning implied by (or supplied with) the effective one.
    pub delta0: f64,
    /// Effective optomechanical coupling sqrt(2) g a_s.
    pub coupling: Complex64,
}

impl SteadyState {
    pub fn g_x(&self) -> f64 {
        self.coupling.re
    }

    pub fn g_y(&self) -> f64 {
        self.coupling.im
    }

    /// Fixed point in the mean-field state layout
    /// (q1, p1, q2, p2, Re a1, Im a1, Re a2, Im a2).
    pub fn mean_field_state(&self) -> [f64; 8] {
        [
            self.q_s,
            self.p_s,
            self.q_s,
            self.p_s,
            self.a_s.re,
            self.a_s.im,
            self.a_s.re,
            self.a_s.im,
        ]
    }
}

/// One self-consistent operating point together with its linear stability.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub state: SteadyState,
    pub stability: StabilityReport,
}

fn denominator(p: &PhysicalParams, delta: f64) -> f64 {
    let s = delta + p.lambda_hop;
    p.kappa * p.kappa + s * s - 4.0 * p.opa_gain * p.opa_gain
}

fn numerator(p: &PhysicalParams, delta: f64) -> Complex64 {
    let pump = Complex64::from_polar(2.0 * p.opa_gain, p.opa_phase);
    Complex64::new(p.kappa, -(delta + p.lambda_hop)) + pump
}

/// Operating point for a given effective detuning.
pub fn steady_state_given_delta(params: &PhysicalParams, delta: f64) -> Result<SteadyState> {
    let den = denominator(params, delta);
    if den.abs() <= DENOMINATOR_EPS {
        return Err(Error::DenominatorSingular { value: den });
    }
    let a_s = numerator(params, delta) * (params.drive_e / den);
    let q_s = params.g * a_s.norm_sqr();
    Ok(SteadyState {
        a_s,
        q_s,
        p_s: 0.0,
        delta_eff: delta,
        delta0: delta + params.g * q_s,
        coupling: a_s * (std::f64::consts::SQRT_2 * params.g),
    })
}

/// All operating points compatible with a bare detuning, sorted by
/// ascending intracavity photon number.
///
/// The self-consistency delta = delta0 - g^2 u with u = |a_s|^2 is cleared of
/// denominators and written as a quintic in the detuning, whose real roots
/// are isolated exactly and refined by bisection.
pub fn steady_state_given_delta0(params: &PhysicalParams, delta0: f64) -> Result<Vec<Branch>> {
    let roots = photon_number_roots(params, delta0)?;
    let mut branches = Vec::with_capacity(roots.len());
    for u in roots {
        let delta = delta0 - params.g * params.g * u;
        let mut state = match steady_state_given_delta(params, delta) {
            Ok(s) => s,
            Err(Error::DenominatorSingular { .. }) => continue,
            Err(e) => return Err(e),
        };
        state.delta0 = delta0;
        let stability = is_stable(&build_drift(params, &state).0)?;
        branches.push(Branch { state, stability });
    }
    if branches.is_empty() {
        return Err(Error::NoRealRoot);
    }
    Ok(branches)
}

/// Operating points for whichever detuning the parameters carry.
pub fn steady_states(params: &PhysicalParams) -> Result<Vec<Branch>> {
    match params.detuning {
        Detuning::Effective(delta) => {
            let state = steady_state_given_delta(params, delta)?;
            let stability = is_stable(&build_drift(params, &state).0)?;
            Ok(vec![Branch { state, stability }])
        }
        Detuning::Bare(delta0) => steady_state_given_delta0(params, delta0),
    }
}

fn photon_number_roots(p: &PhysicalParams, delta0: f64) -> Result<Vec<f64>> {
    if p.drive_e == 0.0 {
        return Ok(vec![0.0]);
    }
    let g2 = p.g * p.g;
    let e2 = p.drive_e * p.drive_e;
    if g2 == 0.0 {
        let den = denominator(p, delta0);
        if den.abs() <= DENOMINATOR_EPS {
            return Err(Error::DenominatorSingular { value: den });
        }
        return Ok(vec![e2 * numerator(p, delta0).norm_sqr() / (den * den)]);
    }

    // In s = delta + lambda the fixed point reads
    //   h(s) = (s0 - s)(s^2 + c0)^2 - K (s^2 - 2 b s + a) = 0,
    // with u = (s0 - s) / g^2, so roots with s <= s0 are the physical ones.
    let s0 = delta0 + p.lambda_hop;
    let c0 = p.kappa * p.kappa - 4.0 * p.opa_gain * p.opa_gain;
    let k = g2 * e2;
    let b = 2.0 * p.opa_gain * p.opa_phase.sin();
    let a = (p.kappa + 2.0 * p.opa_gain * p.opa_phase.cos()).powi(2) + b * b;
    let h = |s: f64| (s0 - s) * (s * s + c0).powi(2) - k * (s * s - 2.0 * b * s + a);
    let coeffs = [
        -1.0,
        s0,
        -2.0 * c0,
        2.0 * c0 * s0 - k,
        -c0 * c0 + 2.0 * b * k,
        s0 * c0 * c0 - k * a,
    ];

    let mut roots: Vec<f64> = real_roots(&coeffs, &h)?
        .into_iter()
        .filter(|s| *s <= s0)
        .map(|s| ((s0 - s) / g2).max(0.0))
        .collect();
    if roots.is_empty() {
        return Err(Error::NoRealRoot);
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup();
    Ok(roots)
}

fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, c| acc * x + c)
}

/// Real roots of a polynomial (highest power first, nonzero leading
/// coefficient). Roots of the derivative split the line into monotone
/// pieces; each piece with a sign change holds exactly one root, found by
/// bisection on `refine` (the same polynomial, possibly in a better
/// conditioned form).
fn real_roots(coeffs: &[f64], refine: &dyn Fn(f64) -> f64) -> Result<Vec<f64>> {
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return Ok(Vec::new());
    }
    if degree == 1 {
        return Ok(vec![-coeffs[1] / coeffs[0]]);
    }
    let deriv: Vec<f64> = coeffs[..degree]
        .iter()
        .enumerate()
        .map(|(i, c)| c * (degree - i) as f64)
        .collect();
    let critical = real_roots(&deriv, &|x| poly_eval(&deriv, x))?;

    let bound = 1.0
        + coeffs[1..]
            .iter()
            .fold(0.0f64, |m, c| m.max((c / coeffs[0]).abs()));
    let mut knots = vec![-bound];
    knots.extend(critical.into_iter().filter(|x| x.abs() < bound));
    knots.push(bound);
    knots.sort_by(f64::total_cmp);

    let mut roots = Vec::new();
    for w in knots.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let (f_lo, f_hi) = (refine(lo), refine(hi));
        if f_lo == 0.0 {
            roots.push(lo);
        } else if f_hi != 0.0 && f_lo.signum() != f_hi.signum() {
            roots.push(bisect(refine, lo, hi, f_lo)?);
        }
    }
    if let Some(&last) = knots.last() {
        if refine(last) == 0.0 {
            roots.push(last);
        }
    }
    roots.dedup();
    Ok(roots)
}

fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut f_lo: f64) -> Result<f64> {
    for _ in 0..BISECTION_LIMIT {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::RootFindFailure {
        iterations: BISECTION_LIMIT,
    })
}
