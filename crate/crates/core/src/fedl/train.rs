use std::fmt::Write as _;
use std::time::Instant;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::aggregate::{aggregate, LocalUpdate};
use super::config::TrainConfig;
use super::local::{local_sgd, local_solve, LocalParams};
use super::stream_seed;
use crate::data::{common_dim, UEDataset};
use crate::datagen::fmt_f64;
use crate::error::{Error, Result};
use crate::math::{LossModel, ModelVector};

/// A local update with its iteration count and certificate flag.
type SolvedUpdate = (LocalUpdate, usize, bool);

/// Measurements taken after one global round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    /// 1-based round index.
    pub round: usize,
    /// `F(w^t) = Σ_n p_n F_n(w^t)` over all UEs.
    pub global_loss: f64,
    pub test_accuracy: Option<f64>,
    /// `‖∇F̄^t‖`; for FedAvg the full gradient at `w^t` is reported.
    pub grad_bar_norm: f64,
    pub mean_local_iters: f64,
    /// Local iterations used, in the order of `sampled`.
    pub local_iters: Vec<usize>,
    /// Whether each sampled UE met its θ condition before the cap.
    pub certified: Vec<bool>,
    pub sampled: Vec<usize>,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingTrace {
    /// `F(w⁰)`.
    pub initial_loss: f64,
    pub records: Vec<RoundRecord>,
    /// Model after the last completed round.
    pub final_model: Option<ModelVector>,
}

impl TrainingTrace {
    pub fn final_loss(&self) -> f64 {
        self.records
            .last()
            .map_or(self.initial_loss, |r| r.global_loss)
    }

    pub fn final_accuracy(&self) -> Option<f64> {
        self.records.last().and_then(|r| r.test_accuracy)
    }

    /// CSV with one row per completed round.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "round,global_loss,test_accuracy,grad_bar_norm,mean_local_iters,elapsed_ms\n",
        );
        for r in &self.records {
            let acc = r.test_accuracy.map(fmt_f64).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.round,
                fmt_f64(r.global_loss),
                acc,
                fmt_f64(r.grad_bar_norm),
                fmt_f64(r.mean_local_iters),
                fmt_f64(r.elapsed_ms)
            );
        }
        out
    }
}

/// A failed run: the round that failed, the cause and every completed round.
#[derive(Debug, thiserror::Error)]
#[error("round {round}: {source}")]
pub struct TrainError {
    pub round: usize,
    #[source]
    pub source: Error,
    pub partial: TrainingTrace,
}

impl TrainError {
    fn setup(source: Error) -> Self {
        Self {
            round: 0,
            source,
            partial: TrainingTrace::default(),
        }
    }
}

/// `Σ_n p_n F_n(w)` with the stored UE weights.
pub fn global_loss(w: &ModelVector, ues: &[UEDataset], model: &LossModel) -> Result<f64> {
    let total: f64 = ues.iter().map(|u| u.weight).sum();
    let mut acc = 0.0;
    for ue in ues {
        acc += ue.weight / total * model.loss(w, ue)?;
    }
    Ok(acc)
}

fn global_grad(w: &ModelVector, ues: &[UEDataset], model: &LossModel) -> Result<ModelVector> {
    let total: f64 = ues.iter().map(|u| u.weight).sum();
    let mut g = ModelVector::zeros(w.len());
    for ue in ues {
        g.axpy(ue.weight / total, &model.grad(w, ue, None)?);
    }
    Ok(g)
}

/// Pooled accuracy over all test sets.
fn test_accuracy(
    w: &ModelVector,
    test: Option<&[UEDataset]>,
    model: &LossModel,
) -> Result<Option<f64>> {
    let Some(test) = test else { return Ok(None) };
    let (mut hits, mut count) = (0.0, 0usize);
    for ue in test {
        match model.accuracy(w, ue)? {
            Some(a) => {
                hits += a * ue.len() as f64;
                count += ue.len();
            }
            None => return Ok(None),
        }
    }
    Ok((count > 0).then(|| hits / count as f64))
}

fn check_inputs(
    cfg: &TrainConfig,
    train: &[UEDataset],
    test: Option<&[UEDataset]>,
    model: &LossModel,
) -> Result<usize> {
    model.validate()?;
    if train.is_empty() {
        return Err(Error::invalid("no training UEs"));
    }
    cfg.validate(train.len())?;
    let dim = common_dim(train)?;
    if let Some(test) = test {
        if !test.is_empty() {
            let td = common_dim(test)?;
            if td != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: td,
                });
            }
        }
    }
    if train.iter().any(|u| !(u.weight > 0.0)) {
        return Err(Error::invalid("UE weights must be positive"));
    }
    Ok(model.param_dim(dim))
}

/// Uniform sample of `s` UEs without replacement, ascending.
fn sample_round(cfg: &TrainConfig, n: usize, round: usize) -> Vec<usize> {
    if cfg.subset == n {
        return (0..n).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(cfg.seed, u64::MAX, round as u64));
    let mut idx = sample(&mut rng, n, cfg.subset).into_vec();
    idx.sort_unstable();
    idx
}

/// Keep the lowest-index error so parallel runs fail the same way.
fn first_error<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    results.into_iter().collect()
}

/// FEDL: θ-approximate local surrogate solves, aggregation of models
/// and gradients, feedback of `(w^t, ∇F̄^t)`.
///
/// Starts from `w⁰ = 0` with `∇F̄⁰ = ∇F(w⁰)`.
pub fn run_fedl(
    cfg: &TrainConfig,
    train: &[UEDataset],
    test: Option<&[UEDataset]>,
    model: &LossModel,
) -> Result<TrainingTrace, TrainError> {
    let dim = check_inputs(cfg, train, test, model).map_err(TrainError::setup)?;
    let mut w = ModelVector::zeros(dim);
    let mut gbar = global_grad(&w, train, model).map_err(TrainError::setup)?;
    let mut trace = TrainingTrace {
        initial_loss: global_loss(&w, train, model).map_err(TrainError::setup)?,
        records: Vec::with_capacity(cfg.k_g),
        final_model: Some(w.clone()),
    };
    let params = LocalParams {
        eta: cfg.eta,
        theta: cfg.theta,
        max_iters: cfg.k_l,
        h: cfg.h,
        batch: cfg.batch,
    };
    for round in 1..=cfg.k_g {
        let start = Instant::now();
        let sampled = sample_round(cfg, train.len(), round);
        let step = || -> Result<(Vec<SolvedUpdate>, ModelVector, ModelVector)> {
            let results: Vec<Result<SolvedUpdate>> = sampled
                .par_iter()
                .map(|&n| {
                    let ue = &train[n];
                    let mut rng =
                        ChaCha8Rng::seed_from_u64(stream_seed(cfg.seed, n as u64, round as u64));
                    let sol = local_solve(&w, &gbar, &params, ue, n, model, &mut rng)?;
                    let grad = model.grad(&sol.w, ue, None)?;
                    Ok((
                        LocalUpdate {
                            ue: n,
                            weight: ue.weight,
                            w: sol.w,
                            grad,
                        },
                        sol.iterations,
                        sol.certified,
                    ))
                })
                .collect();
            let locals = first_error(results)?;
            let updates: Vec<LocalUpdate> = locals.iter().map(|l| l.0.clone()).collect();
            let (w_new, g_new) = aggregate(&updates)?;
            if !w_new.is_finite() || !g_new.is_finite() {
                return Err(Error::Divergence { ue: sampled[0] });
            }
            Ok((locals, w_new, g_new))
        };
        let outcome = step().and_then(|(locals, w_new, g_new)| {
            let loss = global_loss(&w_new, train, model)?;
            let acc = test_accuracy(&w_new, test, model)?;
            Ok((locals, w_new, g_new, loss, acc))
        });
        let (locals, w_new, g_new, loss, acc) = match outcome {
            Ok(v) => v,
            Err(source) => {
                return Err(TrainError {
                    round,
                    source,
                    partial: trace,
                })
            }
        };
        w = w_new;
        gbar = g_new;
        let local_iters: Vec<usize> = locals.iter().map(|l| l.1).collect();
        trace.records.push(RoundRecord {
            round,
            global_loss: loss,
            test_accuracy: acc,
            grad_bar_norm: gbar.norm(),
            mean_local_iters: local_iters.iter().sum::<usize>() as f64 / local_iters.len() as f64,
            local_iters,
            certified: locals.iter().map(|l| l.2).collect(),
            sampled,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        });
        trace.final_model = Some(w.clone());
    }
    Ok(trace)
}

/// FedAvg: `K_l` local (mini-batch) gradient steps on `F_n`, then a
/// weighted average of the models. `θ` and `η` are ignored.
pub fn run_fedavg(
    cfg: &TrainConfig,
    train: &[UEDataset],
    test: Option<&[UEDataset]>,
    model: &LossModel,
) -> Result<TrainingTrace, TrainError> {
    let dim = check_inputs(cfg, train, test, model).map_err(TrainError::setup)?;
    let mut w = ModelVector::zeros(dim);
    let mut trace = TrainingTrace {
        initial_loss: global_loss(&w, train, model).map_err(TrainError::setup)?,
        records: Vec::with_capacity(cfg.k_g),
        final_model: Some(w.clone()),
    };
    for round in 1..=cfg.k_g {
        let start = Instant::now();
        let sampled = sample_round(cfg, train.len(), round);
        let outcome = (|| -> Result<(ModelVector, f64, Option<f64>, f64)> {
            let results: Vec<Result<LocalUpdate>> = sampled
                .par_iter()
                .map(|&n| {
                    let ue = &train[n];
                    let mut rng =
                        ChaCha8Rng::seed_from_u64(stream_seed(cfg.seed, n as u64, round as u64));
                    let w_n = local_sgd(&w, cfg.k_l, cfg.h, cfg.batch, ue, n, model, &mut rng)?;
                    Ok(LocalUpdate {
                        ue: n,
                        weight: ue.weight,
                        grad: ModelVector::zeros(dim),
                        w: w_n,
                    })
                })
                .collect();
            let (w_new, _) = aggregate(&first_error(results)?)?;
            if !w_new.is_finite() {
                return Err(Error::Divergence { ue: sampled[0] });
            }
            let loss = global_loss(&w_new, train, model)?;
            let acc = test_accuracy(&w_new, test, model)?;
            let gnorm = global_grad(&w_new, train, model)?.norm();
            Ok((w_new, loss, acc, gnorm))
        })();
        let (w_new, loss, acc, gnorm) = match outcome {
            Ok(v) => v,
            Err(source) => {
                return Err(TrainError {
                    round,
                    source,
                    partial: trace,
                })
            }
        };
        w = w_new;
        trace.records.push(RoundRecord {
            round,
            global_loss: loss,
            test_accuracy: acc,
            grad_bar_norm: gnorm,
            mean_local_iters: cfg.k_l as f64,
            local_iters: vec![cfg.k_l; sampled.len()],
            certified: vec![false; sampled.len()],
            sampled,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        });
        trace.final_model = Some(w.clone());
    }
    Ok(trace)
}
