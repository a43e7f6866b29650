use serde::{Deserialize, Serialize};

use super::sub1::Sub1Solution;
use super::sub2::Sub2Solution;
use crate::error::{Error, Result};
use crate::fedl::{k_l, theta_rate, LocalSolverConstants};

pub const THETA_RANGE: (f64, f64) = (1e-4, 0.999);
pub const ETA_RANGE: (f64, f64) = (1e-4, 10.0);
pub const GRID_POINTS: usize = 200;
const MIN_STEP: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sub3Solution {
    pub theta_star: f64,
    pub eta_star: f64,
    #[serde(rename = "Theta")]
    pub theta_rate: f64,
    /// Local rounds `K_l(θ*)`.
    #[serde(rename = "K_l")]
    pub k_l: f64,
    /// `(A + K_l·B)/Θ` per unit of `ln(gap0/ε)`.
    pub objective: f64,
}

/// Per-round costs feeding the `(θ, η)` problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoundCosts {
    /// Communication: `Σ E_co + κ·T_co`.
    pub comm: f64,
    /// One local round of computation: `Σ E_cp + κ·T_cp`.
    pub comp: f64,
}

impl RoundCosts {
    pub fn new(sub1: &Sub1Solution, sub2: &Sub2Solution, kappa: f64) -> Self {
        Self {
            comm: sub2.energy_co.iter().sum::<f64>() + kappa * sub2.t_co_star,
            comp: sub1.energy_cp.iter().sum::<f64>() + kappa * sub1.t_cp_star,
        }
    }
}

/// `(A + K_l(θ)·B)/Θ(θ, η)`, or `None` outside `Θ ∈ (0, 1)`.
pub fn sub3_objective(
    theta: f64,
    eta: f64,
    costs: RoundCosts,
    consts: &LocalSolverConstants,
    rho: f64,
) -> Option<f64> {
    let rate = theta_rate(theta, eta, rho);
    if !(rate > 0.0 && rate < 1.0) {
        return None;
    }
    Some((costs.comm + k_l(theta, consts) * costs.comp) / rate)
}

/// `n` log-spaced points over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Best `(θ, η)` on a log grid, refined by a pattern search in log space
/// until the step falls below `1e-6`.
pub fn solve_sub3(
    sub1: &Sub1Solution,
    sub2: &Sub2Solution,
    consts: &LocalSolverConstants,
    rho: f64,
    kappa: f64,
) -> Result<Sub3Solution> {
    solve_sub3_costs(RoundCosts::new(sub1, sub2, kappa), consts, rho)
}

pub fn solve_sub3_costs(
    costs: RoundCosts,
    consts: &LocalSolverConstants,
    rho: f64,
) -> Result<Sub3Solution> {
    if !(rho >= 1.0 && rho.is_finite()) {
        return Err(Error::invalid(format!(
            "rho must be finite and >= 1, got {rho}"
        )));
    }
    if !(costs.comm >= 0.0 && costs.comp >= 0.0) {
        return Err(Error::invalid("round costs must be non-negative"));
    }
    let thetas = log_grid(THETA_RANGE.0, THETA_RANGE.1, GRID_POINTS);
    let etas = log_grid(ETA_RANGE.0, ETA_RANGE.1, GRID_POINTS);
    let mut best: Option<(f64, f64, f64)> = None;
    let mut max_rate = f64::NEG_INFINITY;
    for &theta in &thetas {
        for &eta in &etas {
            max_rate = max_rate.max(theta_rate(theta, eta, rho));
            if let Some(obj) = sub3_objective(theta, eta, costs, consts, rho) {
                if best.is_none_or(|b| obj < b.0) {
                    best = Some((obj, theta, eta));
                }
            }
        }
    }
    let Some((mut obj, theta0, eta0)) = best else {
        return Err(Error::Infeasible {
            max_theta_rate: max_rate,
        });
    };

    let bounds_u = (THETA_RANGE.0.ln(), THETA_RANGE.1.ln());
    let bounds_v = (ETA_RANGE.0.ln(), ETA_RANGE.1.ln());
    let (mut u, mut v) = (theta0.ln(), eta0.ln());
    let mut step_u = (bounds_u.1 - bounds_u.0) / (GRID_POINTS - 1) as f64;
    let mut step_v = (bounds_v.1 - bounds_v.0) / (GRID_POINTS - 1) as f64;
    const MOVES: [(f64, f64); 8] = [
        (1.0, 0.0),
        (-1.0, 0.0),
        (0.0, 1.0),
        (0.0, -1.0),
        (1.0, 1.0),
        (-1.0, -1.0),
        (1.0, -1.0),
        (-1.0, 1.0),
    ];
    while step_u.max(step_v) >= MIN_STEP {
        let mut moved = false;
        for (du, dv) in MOVES {
            let cu = (u + du * step_u).clamp(bounds_u.0, bounds_u.1);
            let cv = (v + dv * step_v).clamp(bounds_v.0, bounds_v.1);
            if let Some(o) = sub3_objective(cu.exp(), cv.exp(), costs, consts, rho) {
                if o < obj {
                    (obj, u, v) = (o, cu, cv);
                    moved = true;
                    break;
                }
            }
        }
        if !moved {
            step_u *= 0.5;
            step_v *= 0.5;
        }
    }
    let (theta, eta) = (u.exp(), v.exp());
    Ok(Sub3Solution {
        theta_star: theta,
        eta_star: eta,
        theta_rate: theta_rate(theta, eta, rho),
        k_l: k_l(theta, consts),
        objective: obj,
    })
}
