//! Energy/time models of computation and uplink transmission, and the
//! allocation of CPU frequency, upload time and `(θ, η)` that minimises
//! `K_g·(E_g + κ·T_g)`.
//!
//! The joint problem splits into three parts. CPU frequencies and upload
//! times have closed forms ([`solve_sub1`], [`solve_sub2`]); the learning
//! parameters are found numerically ([`solve_sub3`]). [`kkt_check_sub1`] and
//! [`kkt_check_sub2`] rebuild the multipliers and report residuals.

mod alloc;
mod instance;
mod kkt;
mod model;
mod sub1;
mod sub2;
mod sub3;

pub use alloc::{pareto_sweep, solve_fedl_alloc, FedlAllocation, ParetoPoint};
pub use instance::{heterogeneous_instance, reference_instance, Instance, LearningParams};
pub use kkt::{kkt_check_sub1, kkt_check_sub2, KktReport};
pub use model::{
    energy_co, energy_co_slope, energy_cp, g_fn, g_inv, heterogeneity, power_of_tau, tau_bounds,
    SystemParams, UEProfile,
};
pub use sub1::{
    classify_kappa, solve_sub1, sub1_objective, threshold_partition, KappaThresholds, Partition,
    Region, Sub1Solution,
};
pub use sub2::{optimal_tau, solve_sub2, Sub2Solution};
pub use sub3::{
    log_grid, solve_sub3, solve_sub3_costs, sub3_objective, RoundCosts, Sub3Solution, ETA_RANGE,
    GRID_POINTS, THETA_RANGE,
};
