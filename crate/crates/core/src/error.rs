use thiserror::Error;

/// Every failure the pipeline can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: must be {constraint}")]
    InvalidParam {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("steady-state denominator kappa^2 + (delta + lambda)^2 - 4 opa_gain^2 = {value:e} is singular (parametric threshold)")]
    DenominatorSingular { value: f64 },

    #[error("no real non-negative root of the detuning fixed point")]
    NoRealRoot,

    #[error("root refinement did not converge after {iterations} iterations")]
    RootFindFailure { iterations: usize },

    #[error("mean-field trajectory left the finite range at t = {time}")]
    NonFinite { time: f64 },

    #[error("eigenvalue iteration did not converge")]
    ConvergenceFailure,

    #[error("drift matrix is not asymptotically stable (margin {margin:e})")]
    UnstableDrift { margin: f64 },

    #[error("singular linear system (pivot {pivot:e}, scale {scale:e})")]
    SingularSystem { pivot: f64, scale: f64 },

    #[error("Lyapunov residual {residual:e} exceeds bound {bound:e}")]
    ResidualTooLarge { residual: f64, bound: f64 },

    #[error("eigenvalues of the symplectic product deviate from the imaginary axis (relative {deviation:e})")]
    NotSymplecticSpectrum { deviation: f64 },

    #[error("unphysical covariance matrix: {0}")]
    UnphysicalCM(String),
}

pub type Result<T> = std::result::Result<T, Error>;
