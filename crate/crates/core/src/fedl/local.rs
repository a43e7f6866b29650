use rand::seq::index::sample;
use rand::Rng;

use super::config::Batch;
use crate::data::UEDataset;
use crate::error::{Error, Result};
use crate::math::{LossModel, ModelVector};

/// `∇J_n(w) = ∇F_n(w) + η·∇F̄ − ∇F_n(w_prev)`.
pub fn surrogate_grad(
    w: &ModelVector,
    w_prev: &ModelVector,
    gbar: &ModelVector,
    eta: f64,
    ue: &UEDataset,
    model: &LossModel,
) -> Result<ModelVector> {
    let dim = model.param_dim(ue.dim());
    w_prev.check_dim(dim)?;
    gbar.check_dim(dim)?;
    // difference first, so w = w_prev yields η·gbar exactly
    let mut g = model.grad(w, ue, None)?;
    g.axpy(-1.0, &model.grad(w_prev, ue, None)?);
    g.axpy(eta, gbar);
    Ok(g)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalParams {
    pub eta: f64,
    pub theta: f64,
    /// Iteration cap `K_l`.
    pub max_iters: usize,
    pub h: f64,
    pub batch: Batch,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalSolution {
    pub w: ModelVector,
    pub iterations: usize,
    /// `‖∇J(w)‖ ≤ θ‖∇J(w_prev)‖` was reached before the cap.
    pub certified: bool,
}

/// Gradient descent on the local surrogate, started at `w_prev`.
///
/// The accuracy test always uses the full-batch surrogate gradient; with
/// mini-batches only the descent step is stochastic.
pub fn local_solve<R: Rng + ?Sized>(
    w_prev: &ModelVector,
    gbar: &ModelVector,
    params: &LocalParams,
    ue: &UEDataset,
    ue_index: usize,
    model: &LossModel,
    rng: &mut R,
) -> Result<LocalSolution> {
    if !(params.h > 0.0) {
        return Err(Error::invalid("local learning rate must be positive"));
    }
    let dim = model.param_dim(ue.dim());
    w_prev.check_dim(dim)?;
    gbar.check_dim(dim)?;

    let grad_prev = model.grad(w_prev, ue, None)?;
    let surrogate = |g: &mut ModelVector| {
        g.axpy(-1.0, &grad_prev);
        g.axpy(params.eta, gbar);
    };

    let mut z = w_prev.clone();
    let mut target = None;
    for k in 0..=params.max_iters {
        let mut g = model.grad(&z, ue, None)?;
        surrogate(&mut g);
        let norm = g.norm();
        let target = *target.get_or_insert(params.theta * norm);
        if norm <= target {
            return Ok(LocalSolution {
                w: z,
                iterations: k,
                certified: true,
            });
        }
        if k == params.max_iters {
            break;
        }
        match params.batch {
            Batch::Size(b) if b < ue.len() => {
                let idx = sample(rng, ue.len(), b).into_vec();
                let mut gb = model.grad(&z, ue, Some(&idx))?;
                surrogate(&mut gb);
                z.axpy(-params.h, &gb);
            }
            _ => z.axpy(-params.h, &g),
        }
        if !z.is_finite() {
            return Err(Error::Divergence { ue: ue_index });
        }
    }
    Ok(LocalSolution {
        w: z,
        iterations: params.max_iters,
        certified: false,
    })
}

/// `K_l` steps of (mini-batch) gradient descent on `F_n` alone.
#[allow(clippy::too_many_arguments)]
pub(crate) fn local_sgd<R: Rng + ?Sized>(
    w_start: &ModelVector,
    steps: usize,
    h: f64,
    batch: Batch,
    ue: &UEDataset,
    ue_index: usize,
    model: &LossModel,
    rng: &mut R,
) -> Result<ModelVector> {
    let mut z = w_start.clone();
    for _ in 0..steps {
        let g = match batch {
            Batch::Size(b) if b < ue.len() => {
                let idx = sample(rng, ue.len(), b).into_vec();
                model.grad(&z, ue, Some(&idx))?
            }
            _ => model.grad(&z, ue, None)?,
        };
        z.axpy(-h, &g);
        if !z.is_finite() {
            return Err(Error::Divergence { ue: ue_index });
        }
    }
    Ok(z)
}
