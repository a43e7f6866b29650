use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::{validate_all, SystemParams, UEProfile};
use super::sub1::{classify_kappa, solve_sub1, KappaThresholds, Region, Sub1Solution};
use super::sub2::{solve_sub2, Sub2Solution};
use super::sub3::{solve_sub3, Sub3Solution};
use crate::error::{Error, Result};
use crate::fedl::LocalSolverConstants;

/// The three subproblem solutions and the resulting totals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FedlAllocation {
    pub kappa: f64,
    pub sub1: Sub1Solution,
    pub sub2: Sub2Solution,
    pub sub3: Sub3Solution,
    pub region: Region,
    pub thresholds: KappaThresholds,
    /// `(1/Θ)·ln(gap0/ε)`.
    #[serde(rename = "K_g")]
    pub k_g: f64,
    /// Energy per global round, `Σ E_co + K_l·Σ E_cp`.
    #[serde(rename = "E_g")]
    pub e_g: f64,
    /// Time per global round, `T_co + K_l·T_cp`.
    #[serde(rename = "T_g")]
    pub t_g: f64,
    pub total_energy: f64,
    pub total_time: f64,
    /// `K_g·(E_g + κ·T_g)`.
    pub objective: f64,
}

/// Solve the frequency and upload-time subproblems, then `(θ, η)`.
pub fn solve_fedl_alloc(
    ues: &[UEProfile],
    sys: &SystemParams,
    consts: &LocalSolverConstants,
    rho: f64,
    gap0_over_eps: f64,
) -> Result<FedlAllocation> {
    validate_all(ues, sys)?;
    if !(gap0_over_eps >= 1.0 && gap0_over_eps.is_finite()) {
        return Err(Error::invalid(format!(
            "gap0/eps must be >= 1, got {gap0_over_eps}"
        )));
    }
    let kappa = sys.kappa;
    let sub1 = solve_sub1(ues, sys)?;
    let sub2 = solve_sub2(ues, sys)?;
    let sub3 = solve_sub3(&sub1, &sub2, consts, rho, kappa)?;
    let (region, thresholds) = classify_kappa(ues, sys)?;
    let k_g = gap0_over_eps.ln() / sub3.theta_rate;
    let e_g = sub2.energy_co.iter().sum::<f64>() + sub3.k_l * sub1.energy_cp.iter().sum::<f64>();
    let t_g = sub2.t_co_star + sub3.k_l * sub1.t_cp_star;
    Ok(FedlAllocation {
        kappa,
        region,
        thresholds,
        k_g,
        e_g,
        t_g,
        total_energy: k_g * e_g,
        total_time: k_g * t_g,
        objective: k_g * (e_g + kappa * t_g),
        sub1,
        sub2,
        sub3,
    })
}

/// One point of the time/energy trade-off.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParetoPoint {
    pub kappa: f64,
    pub total_time: f64,
    pub total_energy: f64,
    pub theta_star: f64,
    pub eta_star: f64,
    #[serde(rename = "Theta")]
    pub theta_rate: f64,
}

impl From<&FedlAllocation> for ParetoPoint {
    fn from(a: &FedlAllocation) -> Self {
        Self {
            kappa: a.kappa,
            total_time: a.total_time,
            total_energy: a.total_energy,
            theta_star: a.sub3.theta_star,
            eta_star: a.sub3.eta_star,
            theta_rate: a.sub3.theta_rate,
        }
    }
}

/// Full solve at every κ (in parallel), returned in ascending κ.
pub fn pareto_sweep(
    ues: &[UEProfile],
    sys: &SystemParams,
    consts: &LocalSolverConstants,
    rho: f64,
    gap0_over_eps: f64,
    kappas: &[f64],
) -> Result<Vec<ParetoPoint>> {
    if kappas.is_empty() {
        return Err(Error::invalid("empty kappa grid"));
    }
    let mut grid = kappas.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.par_iter()
        .map(|&k| {
            solve_fedl_alloc(ues, &sys.with_kappa(k), consts, rho, gap0_over_eps)
                .map(|a| ParetoPoint::from(&a))
        })
        .collect()
}
