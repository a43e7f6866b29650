use serde::{Deserialize, Serialize};

use super::model::{energy_co, g_fn, g_inv, tau_bounds, validate_all, SystemParams, UEProfile};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sub2Solution {
    pub tau_star: Vec<f64>,
    #[serde(rename = "T_co_star")]
    pub t_co_star: f64,
    pub energy_co: Vec<f64>,
    /// `Σ E_co + κ·T_co`.
    pub objective: f64,
}

/// Optimal upload time of one UE: `τ_max` when `κ ≤ g⁻¹(τ_max)`, `τ_min`
/// when `κ ≥ g⁻¹(τ_min)`, otherwise `g(κ)`.
pub fn optimal_tau(ue: &UEProfile, sys: &SystemParams) -> Result<f64> {
    let (tau_min, tau_max) = tau_bounds(ue, sys);
    let kappa = sys.kappa;
    if kappa <= g_inv(ue, sys, tau_max) {
        Ok(tau_max)
    } else if kappa >= g_inv(ue, sys, tau_min) {
        Ok(tau_min)
    } else {
        Ok(g_fn(ue, sys, kappa)?.clamp(tau_min, tau_max))
    }
}

/// Closed-form optimum of the time-sharing subproblem; UEs decouple.
pub fn solve_sub2(ues: &[UEProfile], sys: &SystemParams) -> Result<Sub2Solution> {
    validate_all(ues, sys)?;
    let tau_star = ues
        .iter()
        .map(|u| optimal_tau(u, sys))
        .collect::<Result<Vec<_>>>()?;
    let energy: Vec<f64> = ues
        .iter()
        .zip(&tau_star)
        .map(|(u, &t)| energy_co(u, sys, t))
        .collect();
    let t_co: f64 = tau_star.iter().sum();
    Ok(Sub2Solution {
        objective: energy.iter().sum::<f64>() + sys.kappa * t_co,
        t_co_star: t_co,
        tau_star,
        energy_co: energy,
    })
}
