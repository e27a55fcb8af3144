//! Mirror-mirror logarithmic negativity.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, Matrix4};

use crate::error::{Error, Result};
use crate::lyapunov::CovarianceMatrix;

const DISCRIMINANT_TOL: f64 = 1e-12;
const ENTANGLEMENT_TOL: f64 = 1e-12;

/// How the negativity is obtained from the smallest partially transposed
/// symplectic eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    /// max(0, -ln 2 eta), consistent with vacuum variance 1/2.
    #[default]
    Ln2Eta,
    /// max(0, -ln eta).
    LnEta,
}

impl FromStr for Convention {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "ln2eta" => Ok(Self::Ln2Eta),
            "lneta" => Ok(Self::LnEta),
            other => Err(format!(
                "unknown convention {other:?} (expected ln2eta or lneta)"
            )),
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ln2Eta => "ln2eta",
            Self::LnEta => "lneta",
        })
    }
}

/// Mechanical 4x4 covariance block in the form [[A, C], [C^T, B]].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanicalCM {
    pub a: Matrix2<f64>,
    pub b: Matrix2<f64>,
    pub c: Matrix2<f64>,
}

impl MechanicalCM {
    pub fn full(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&self.a);
        m.fixed_view_mut::<2, 2>(2, 2).copy_from(&self.b);
        m.fixed_view_mut::<2, 2>(0, 2).copy_from(&self.c);
        m.fixed_view_mut::<2, 2>(2, 0)
            .copy_from(&self.c.transpose());
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementResult {
    pub eta_minus: f64,
    pub e_n: f64,
    pub entangled: bool,
}

/// Keeps the first four rows and columns (the two mirrors).
pub fn reduce_mechanical(v: &CovarianceMatrix) -> MechanicalCM {
    let v = &v.0;
    MechanicalCM {
        a: v.fixed_view::<2, 2>(0, 0).into_owned(),
        b: v.fixed_view::<2, 2>(2, 2).into_owned(),
        c: v.fixed_view::<2, 2>(0, 2).into_owned(),
    }
}

pub fn log_negativity(vm: &MechanicalCM, convention: Convention) -> Result<EntanglementResult> {
    let sigma = vm.a.determinant() + vm.b.determinant() - 2.0 * vm.c.determinant();
    let det = vm.full().determinant();
    if det < -DISCRIMINANT_TOL {
        return Err(Error::UnphysicalCM(format!("det V_m = {det:e} < 0")));
    }
    let disc = sigma * sigma - 4.0 * det.max(0.0);
    if disc < -DISCRIMINANT_TOL {
        return Err(Error::UnphysicalCM(format!(
            "Sigma^2 - 4 det V_m = {disc:e} < 0"
        )));
    }
    let inner = 0.5 * (sigma - disc.max(0.0).sqrt());
    if inner < -DISCRIMINANT_TOL {
        return Err(Error::UnphysicalCM(format!("eta^2 = {inner:e} < 0")));
    }
    let eta_minus = inner.max(0.0).sqrt();
    let e_n = match convention {
        Convention::Ln2Eta => (-(2.0 * eta_minus).ln()).max(0.0),
        Convention::LnEta => (-eta_minus.ln()).max(0.0),
    };
    Ok(EntanglementResult {
        eta_minus,
        e_n,
        entangled: eta_minus < 0.5 - ENTANGLEMENT_TOL,
    })
}
