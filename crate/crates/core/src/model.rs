//! Physical parameters of the two-cavity system.
//!
//! Every rate and frequency is measured in units of the mechanical frequency,
//! so the mechanical frequency itself is 1 throughout the crate.

use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J / K.
pub const K_B: f64 = 1.380_649e-23;

/// Which detuning the caller supplies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Detuning {
    /// Effective detuning, already shifted by the static mirror displacement.
    Effective(f64),
    /// Bare laser-cavity detuning; the effective value is found self-consistently.
    Bare(f64),
}

/// Rates, drive, amplifier settings and bath occupancies.
///
/// Both cavities and both mirrors are identical, so one copy of each
/// parameter describes the whole system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Cavity amplitude decay rate.
    pub kappa: f64,
    /// Mechanical damping rate.
    pub gamma_m: f64,
    /// Single-photon optomechanical coupling.
    pub g: f64,
    /// Photon-hopping rate between the two cavities.
    pub lambda_hop: f64,
    /// Laser drive amplitude.
    pub drive_e: f64,
    /// Parametric gain of each amplifier.
    pub opa_gain: f64,
    /// Pump phase in radians.
    pub opa_phase: f64,
    pub detuning: Detuning,
    /// Thermal photon occupancy of the optical baths.
    pub n_a: f64,
    /// Thermal phonon occupancy of the mechanical baths.
    pub n_m: f64,
}

impl PhysicalParams {
    /// Reference operating point used by the reproduction runs.
    ///
    /// kappa = 0.01, gamma_m = 2e-3, lambda = 20, E = 2e7, delta = 3,
    /// opa_gain = 1.3, opa_phase = pi/2, zero thermal occupancy.
    ///
    /// The coupling is g = 4e-6. Only the product g E enters the linearized
    /// dynamics at fixed effective detuning, and g E = 80 is the value that
    /// puts the no-amplifier stability edge at lambda = 20.4 (delta = 3) and
    /// 26.4 (delta = -3). The nominal g = 4e-4 gives |G| of roughly 440 and no
    /// stable point anywhere in the parameter ranges of interest.
    pub fn baseline() -> Self {
        Self {
            kappa: 0.01,
            gamma_m: 2e-3,
            g: 4e-6,
            lambda_hop: 20.0,
            drive_e: 2e7,
            opa_gain: 1.3,
            opa_phase: std::f64::consts::FRAC_PI_2,
            detuning: Detuning::Effective(3.0),
            n_a: 0.0,
            n_m: 0.0,
        }
    }

    /// Checks every bound and reduces the pump phase into [0, 2 pi).
    pub fn validate(self) -> Result<Self> {
        fn check(name: &'static str, value: f64, ok: bool, constraint: &'static str) -> Result<()> {
            if ok && value.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParam {
                    name,
                    value,
                    constraint,
                })
            }
        }
        check("kappa", self.kappa, self.kappa > 0.0, "> 0")?;
        check("gamma_m", self.gamma_m, self.gamma_m > 0.0, "> 0")?;
        check("g", self.g, self.g >= 0.0, ">= 0")?;
        check(
            "lambda_hop",
            self.lambda_hop,
            self.lambda_hop >= 0.0,
            ">= 0",
        )?;
        check("drive_E", self.drive_e, self.drive_e >= 0.0, ">= 0")?;
        check("opa_gain", self.opa_gain, self.opa_gain >= 0.0, ">= 0")?;
        check("opa_phase", self.opa_phase, true, "finite")?;
        check("n_a", self.n_a, self.n_a >= 0.0, ">= 0")?;
        check("n_m", self.n_m, self.n_m >= 0.0, ">= 0")?;
        match self.detuning {
            Detuning::Effective(d) => check("delta_eff", d, true, "finite")?,
            Detuning::Bare(d) => check("delta0", d, true, "finite")?,
        }
        let mut p = self;
        p.opa_phase = reduce_phase(self.opa_phase);
        Ok(p)
    }

    /// Same parameters with the effective detuning set to `delta`.
    pub fn with_effective_detuning(mut self, delta: f64) -> Self {
        self.detuning = Detuning::Effective(delta);
        self
    }
}

/// Reduces an angle into [0, 2 pi).
pub fn reduce_phase(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Bose-Einstein occupancy of a mode at angular frequency `freq` (rad/s)
/// in equilibrium with a bath at `temp` kelvin.
pub fn thermal_occupancy(freq: f64, temp: f64) -> Result<f64> {
    if !(freq > 0.0 && freq.is_finite()) {
        return Err(Error::InvalidParam {
            name: "freq",
            value: freq,
            constraint: "> 0",
        });
    }
    if !(temp >= 0.0 && temp.is_finite()) {
        return Err(Error::InvalidParam {
            name: "temp",
            value: temp,
            constraint: ">= 0",
        });
    }
    if temp == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * freq / (K_B * temp);
    Ok(1.0 / x.exp_m1())
}
