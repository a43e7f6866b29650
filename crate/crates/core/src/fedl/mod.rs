//! The FEDL training loop, the FedAvg baseline and the convergence-rate
//! calculators.
//!
//! Each global round every sampled UE approximately minimises its surrogate
//! `J_n(w) = F_n(w) + ⟨η ∇F̄ − ∇F_n(w_prev), w⟩` by gradient descent until
//! `‖∇J_n(w)‖ ≤ θ ‖∇J_n(w_prev)‖`, then the server averages the local models
//! and local gradients with the data weights `p_n`.

mod aggregate;
mod config;
mod local;
mod rates;
mod train;

pub use aggregate::{aggregate, LocalUpdate};
pub use config::{Batch, TrainConfig};
pub use local::{local_solve, surrogate_grad, LocalParams, LocalSolution};
pub use rates::{k_g, k_l, local_iteration_bound, theta_rate, LocalSolverConstants};
pub use train::{global_loss, run_fedavg, run_fedl, RoundRecord, TrainError, TrainingTrace};

/// Mix a seed with two stream coordinates (splitmix64 finaliser).
pub(crate) fn stream_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed
        ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ b.wrapping_mul(0xC2B2_AE3D_27D4_EB4F).rotate_left(17);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
