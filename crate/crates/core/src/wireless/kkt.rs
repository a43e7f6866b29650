use serde::{Deserialize, Serialize};

use super::model::{energy_co_slope, tau_bounds, SystemParams, UEProfile};
use super::sub1::Sub1Solution;
use super::sub2::Sub2Solution;

const ON_BOUND: f64 = 1e-12;
const TIGHT: f64 = 1e-9;

/// Worst relative violation of each KKT condition group.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KktReport {
    pub stationarity: f64,
    pub primal: f64,
    pub dual: f64,
    pub complementary: f64,
}

impl KktReport {
    pub fn max(&self) -> f64 {
        self.stationarity
            .max(self.primal)
            .max(self.dual)
            .max(self.complementary)
    }
}

fn bump(slot: &mut f64, v: f64) {
    if v.is_nan() {
        *slot = f64::INFINITY;
    } else if v > *slot {
        *slot = v;
    }
}

/// KKT residuals of a frequency solution.
///
/// Deadline multipliers are rebuilt from stationarity: `λ_n = α f³` for a
/// UE strictly inside its frequency range, any value in `[α f_max³, ∞)` at
/// `f_max`, `[0, α f_min³]` at `f_min`, and zero when the deadline is slack.
/// The free part is chosen to satisfy `Σλ = κ` where possible; the remainder
/// is reported as dual residual.
pub fn kkt_check_sub1(sol: &Sub1Solution, ues: &[UEProfile], sys: &SystemParams) -> KktReport {
    let kappa = sys.kappa;
    let t = sol.t_cp_star;
    let mut report = KktReport::default();
    if sol.f_star.len() != ues.len() {
        report.primal = f64::INFINITY;
        return report;
    }

    let mut lower = vec![0.0; ues.len()];
    let mut upper = vec![0.0; ues.len()];
    for (n, (ue, &f)) in ues.iter().zip(&sol.f_star).enumerate() {
        let at_max = f >= ue.f_max * (1.0 - ON_BOUND);
        let at_min = f <= ue.f_min * (1.0 + ON_BOUND);
        let tight = ue.load() / f >= t * (1.0 - TIGHT);
        let a = ue.alpha_n;
        (lower[n], upper[n]) = match (tight, at_min, at_max) {
            (false, _, _) => (0.0, 0.0),
            (true, true, true) => (0.0, f64::INFINITY),
            (true, false, true) => (a * ue.f_max.powi(3), f64::INFINITY),
            (true, true, false) => (0.0, a * ue.f_min.powi(3)),
            (true, false, false) => (a * f.powi(3), a * f.powi(3)),
        };
        bump(&mut report.primal, (ue.load() / f - t) / t);
        bump(&mut report.primal, (f - ue.f_max) / ue.f_max);
        bump(&mut report.primal, (ue.f_min - f) / ue.f_min);
    }

    let mut lambda = lower.clone();
    let mut rest = kappa - lower.iter().sum::<f64>();
    for n in 0..ues.len() {
        if rest <= 0.0 {
            break;
        }
        let add = (upper[n] - lower[n]).min(rest);
        lambda[n] += add;
        rest -= add;
    }
    bump(
        &mut report.dual,
        (kappa - lambda.iter().sum::<f64>()).abs() / kappa,
    );

    for (n, (ue, &f)) in ues.iter().zip(&sol.f_star).enumerate() {
        let load = ue.load();
        let scale = if ue.alpha_n > 0.0 {
            ue.alpha_n * load * f
        } else {
            1.0
        };
        let g = ue.alpha_n * load * f - lambda[n] * load / (f * f);
        let at_max = f >= ue.f_max * (1.0 - ON_BOUND);
        let at_min = f <= ue.f_min * (1.0 + ON_BOUND);
        let mu = if at_max { (-g).max(0.0) } else { 0.0 };
        let nu = if at_min { g.max(0.0) } else { 0.0 };
        bump(&mut report.stationarity, (g + mu - nu).abs() / scale);
        bump(
            &mut report.complementary,
            lambda[n] * (t - load / f).abs() / (kappa * t),
        );
        bump(
            &mut report.complementary,
            mu * (ue.f_max - f).abs() / (scale * ue.f_max),
        );
        bump(
            &mut report.complementary,
            nu * (f - ue.f_min).abs() / (scale * ue.f_min),
        );
    }
    report
}

/// KKT residuals of an upload-time solution, with `λ* = κ` for the
/// total-time constraint.
pub fn kkt_check_sub2(sol: &Sub2Solution, ues: &[UEProfile], sys: &SystemParams) -> KktReport {
    let kappa = sys.kappa;
    let mut report = KktReport::default();
    if sol.tau_star.len() != ues.len() {
        report.primal = f64::INFINITY;
        return report;
    }
    let lambda = kappa;
    bump(&mut report.dual, (kappa - lambda).abs() / kappa);
    let sum: f64 = sol.tau_star.iter().sum();
    bump(&mut report.primal, (sol.t_co_star - sum).abs() / sum);
    for (ue, &tau) in ues.iter().zip(&sol.tau_star) {
        let (tau_min, tau_max) = tau_bounds(ue, sys);
        bump(&mut report.primal, (tau - tau_max) / tau_max);
        bump(&mut report.primal, (tau_min - tau) / tau_min);
        let at_max = tau >= tau_max * (1.0 - ON_BOUND);
        let at_min = tau <= tau_min * (1.0 + ON_BOUND);
        let s = energy_co_slope(ue, sys, tau) + lambda;
        let mu = if at_max { (-s).max(0.0) } else { 0.0 };
        let nu = if at_min { s.max(0.0) } else { 0.0 };
        bump(&mut report.stationarity, (s + mu - nu).abs() / kappa);
        bump(
            &mut report.complementary,
            mu * (tau_max - tau).abs() / (kappa * tau_max),
        );
        bump(
            &mut report.complementary,
            nu * (tau - tau_min).abs() / (kappa * tau_min),
        );
    }
    report
}
