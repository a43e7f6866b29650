//! Federated learning with the FEDL algorithm and its wireless resource
//! allocation problem.
//!
//! The crate is organised around the four layers of the simulator:
//!
//! * [`math`]: dense vectors, the two convex loss models, curvature
//!   estimation and the principal branch of the Lambert W function.
//! * [`datagen`]: heterogeneous synthetic datasets and a CSV loader.
//! * [`fedl`]: the FEDL training loop, the FedAvg baseline and the
//!   convergence-rate calculators (Θ, local and global round counts).
//! * [`wireless`]: computation/communication energy models, the closed-form
//!   CPU-frequency and time-sharing solvers, the (θ, η) search, KKT residual
//!   checkers, heterogeneity metrics and Pareto sweeps.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod datagen;
pub mod error;
pub mod fedl;
pub mod math;
pub mod wireless;

pub use data::UEDataset;
pub use error::{Error, Result};
pub use math::{CurvatureConstants, LossModel, ModelVector};
