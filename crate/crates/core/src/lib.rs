//! Steady-state entanglement between the movable mirrors of two coupled
//! optomechanical cavities, each holding a degenerate parametric amplifier.
//!
//! Pipeline: [`steady_state`] finds the classical operating point,
//! [`dynamics`] builds the linearized drift and diffusion matrices,
//! [`stability`] checks the spectrum, [`lyapunov`] solves for the covariance
//! matrix and [`entanglement`] turns its mechanical block into a logarithmic
//! negativity. [`sweep`] repeats that over parameter grids and [`cli`] drives
//! it from configuration files.
//!
//! All rates are in units of the mechanical frequency.

pub mod cli;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod lyapunov;
pub mod model;
pub mod stability;
pub mod steady_state;
pub mod sweep;
pub mod validation;

/// Real 8x8 matrix in the (dq1, dp1, dq2, dp2, dx1, dy1, dx2, dy2) basis.
pub type Matrix8 = nalgebra::SMatrix<f64, 8, 8>;

pub use entanglement::Convention;
pub use error::{Error, Result};
pub use model::{Detuning, PhysicalParams};
