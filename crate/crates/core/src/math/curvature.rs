use serde::{Deserialize, Serialize};

use super::linalg::{inverse_iteration, power_iteration, SymMatrix};
use super::LossModel;
use crate::data::UEDataset;
use crate::error::{Error, Result};

const EIGEN_TOL: f64 = 1e-8;

/// Smoothness `L`, strong convexity `β` and their ratio `ρ = L/β`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureConstants {
    #[serde(rename = "L")]
    pub l: f64,
    pub beta: f64,
}

impl CurvatureConstants {
    pub fn new(l: f64, beta: f64) -> Result<Self> {
        if !(l > 0.0 && beta >= 0.0 && l >= beta) {
            return Err(Error::invalid(format!(
                "curvature constants need L >= beta >= 0 and L > 0 (L={l}, beta={beta})"
            )));
        }
        Ok(Self { l, beta })
    }

    /// Condition number; infinite when `β = 0`.
    pub fn rho(&self) -> f64 {
        if self.beta > 0.0 {
            self.l / self.beta
        } else {
            f64::INFINITY
        }
    }
}

/// Worst-case curvature constants over all UEs: `L = max_n L_n`, `β = min_n β_n`.
///
/// For `MseLinear` the Hessian is `(2/D_n) XᵀX`, whose extreme eigenvalues are
/// found by power and inverse iteration. For `MultinomialLogistic` the softmax
/// Hessian is bounded by `½ (1/D_n) XᵀX ⊗ I + reg·I`, so `β = reg` and `L` is
/// that spectral bound.
pub fn estimate_curvature(model: &LossModel, datasets: &[UEDataset]) -> Result<CurvatureConstants> {
    model.validate()?;
    if datasets.is_empty() || datasets.iter().any(UEDataset::is_empty) {
        return Err(Error::invalid(
            "curvature estimation needs non-empty datasets",
        ));
    }
    let mut l = 0.0f64;
    let mut beta = f64::INFINITY;
    for ds in datasets {
        let n = ds.len() as f64;
        match *model {
            LossModel::MseLinear => {
                let hessian = SymMatrix::gram(ds, 2.0 / n);
                l = l.max(power_iteration(&hessian, EIGEN_TOL));
                beta = beta.min(inverse_iteration(&hessian, EIGEN_TOL));
            }
            LossModel::MultinomialLogistic { reg, .. } => {
                let second_moment = SymMatrix::gram(ds, 1.0 / n);
                l = l.max(0.5 * power_iteration(&second_moment, EIGEN_TOL) + reg);
                beta = reg;
            }
        }
    }
    if l <= 0.0 {
        return Err(Error::invalid("all-zero features give no curvature"));
    }
    Ok(CurvatureConstants { l, beta })
}
