//! Numerical building blocks shared by the learning and allocation layers.

mod curvature;
mod lambert;
pub mod linalg;
mod loss;
mod vector;

pub use curvature::{estimate_curvature, CurvatureConstants};
pub use lambert::lambert_w0;
pub(crate) use loss::dot;
pub use loss::LossModel;
pub use vector::ModelVector;
