use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Global contraction factor Θ(θ, η, ρ) of FEDL.
///
/// Linear convergence `F(wᵗ) − F* ≤ (1−Θ)ᵗ (F(w⁰) − F*)` is guaranteed when
/// the returned value lies in (0, 1).
pub fn theta_rate(theta: f64, eta: f64, rho: f64) -> f64 {
    let rho2 = rho * rho;
    let numerator = eta
        * (2.0 * (theta - 1.0).powi(2)
            - (theta + 1.0) * theta * (3.0 * eta + 2.0) * rho2
            - (theta + 1.0) * eta * rho2);
    let denominator = 2.0 * rho * ((1.0 + theta).powi(2) * eta * eta * rho2 + 1.0);
    numerator / denominator
}

/// Linear-rate constants `J(z_k) − J* ≤ c (1−γ)^k (J(z_0) − J*)` of the local solver.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalSolverConstants {
    pub c: f64,
    pub gamma: f64,
    /// `C = c·ρ`.
    #[serde(rename = "C")]
    pub big_c: f64,
}

impl LocalSolverConstants {
    pub fn new(c: f64, gamma: f64, rho: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::invalid(format!(
                "gamma must lie in (0,1), got {gamma}"
            )));
        }
        if !(c > 0.0 && rho >= 1.0 && rho.is_finite()) {
            return Err(Error::invalid(
                "c must be positive and rho a finite value >= 1",
            ));
        }
        Ok(Self {
            c,
            gamma,
            big_c: c * rho,
        })
    }

    /// Gradient descent with step `1/L`: `c = 1`, `γ = 1/ρ`.
    ///
    /// `ρ = 1` would give `γ = 1`, outside (0,1); it is nudged just below.
    pub fn gradient_descent(rho: f64) -> Result<Self> {
        let gamma = (1.0 / rho).min(1.0 - 1e-12);
        Self::new(1.0, gamma, rho)
    }
}

/// Local rounds needed for a θ-approximate local solution: `(2/γ) ln(C/θ)`.
pub fn k_l(theta: f64, consts: &LocalSolverConstants) -> f64 {
    2.0 / consts.gamma * (consts.big_c / theta).ln()
}

/// Integer local-iteration budget `⌈(2/γ) ln(C/θ)⌉` (0 when that is negative).
pub fn local_iteration_bound(theta: f64, consts: &LocalSolverConstants) -> usize {
    k_l(theta, consts).ceil().max(0.0) as usize
}

/// Global rounds to reach accuracy `eps` from initial gap `gap0`: `(1/Θ) ln(gap0/ε)`.
pub fn k_g(theta_rate: f64, gap0: f64, eps: f64) -> f64 {
    (gap0 / eps).ln() / theta_rate
}
