use serde::{Deserialize, Serialize};

use super::ModelVector;
use crate::data::UEDataset;
use crate::error::{Error, Result};

/// The two convex loss families used by the simulator.
///
/// * `MseLinear`: `F_n(w) = (1/D_n) Σ (⟨x_i, w⟩ − y_i)²`.
/// * `MultinomialLogistic`: mean cross-entropy of a `classes`-way softmax
///   plus `(reg/2)‖w‖²`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LossModel {
    #[default]
    MseLinear,
    MultinomialLogistic {
        classes: usize,
        reg: f64,
    },
}

impl LossModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LossModel::MseLinear => Ok(()),
            LossModel::MultinomialLogistic { classes, reg } => {
                if classes < 2 {
                    return Err(Error::invalid("multinomial model needs at least 2 classes"));
                }
                if !(reg >= 0.0 && reg.is_finite()) {
                    return Err(Error::invalid("regularisation coefficient must be >= 0"));
                }
                Ok(())
            }
        }
    }

    pub fn is_classifier(&self) -> bool {
        matches!(self, LossModel::MultinomialLogistic { .. })
    }

    /// Length of the parameter vector for `d` input features.
    pub fn param_dim(&self, d: usize) -> usize {
        match *self {
            LossModel::MseLinear => d,
            LossModel::MultinomialLogistic { classes, .. } => classes * d,
        }
    }

    fn check(&self, w: &ModelVector, data: &UEDataset) -> Result<()> {
        self.validate()?;
        if data.is_empty() {
            return Err(Error::invalid("empty dataset"));
        }
        w.check_dim(self.param_dim(data.dim()))
    }

    /// Empirical loss `F_n(w)`.
    pub fn loss(&self, w: &ModelVector, data: &UEDataset) -> Result<f64> {
        self.check(w, data)?;
        let n = data.len() as f64;
        match *self {
            LossModel::MseLinear if data.len() >= data.dim() => {
                // ‖Xw − y‖² = ‖Xŵ − y‖² + δᵀXᵀXδ + 2δᵀ(XᵀXŵ − Xᵀy), δ = w − ŵ
                let m = data.moments();
                let delta: Vec<f64> = w
                    .as_slice()
                    .iter()
                    .zip(&m.anchor)
                    .map(|(a, b)| a - b)
                    .collect();
                let quad: f64 = delta
                    .iter()
                    .enumerate()
                    .map(|(r, dr)| dr * (dot(m.xtx.row(r), &delta) + 2.0 * m.anchor_residual[r]))
                    .sum();
                Ok((m.anchor_sse + quad).max(0.0) / n)
            }
            LossModel::MseLinear => {
                let sum: f64 = (0..data.len())
                    .map(|i| {
                        let r = dot(data.row(i), w.as_slice()) - data.label(i);
                        r * r
                    })
                    .sum();
                Ok(sum / n)
            }
            LossModel::MultinomialLogistic { classes, reg } => {
                let d = data.dim();
                let mut logits = vec![0.0; classes];
                let mut sum = 0.0;
                for i in 0..data.len() {
                    let y = class_index(data.label(i), classes)?;
                    fill_logits(data.row(i), w.as_slice(), d, &mut logits);
                    sum += log_sum_exp(&logits) - logits[y];
                }
                Ok(sum / n + 0.5 * reg * w.norm_sq())
            }
        }
    }

    /// Gradient of the empirical loss, restricted to `batch` when given.
    pub fn grad(
        &self,
        w: &ModelVector,
        data: &UEDataset,
        batch: Option<&[usize]>,
    ) -> Result<ModelVector> {
        self.check(w, data)?;
        if let Some(b) = batch {
            if b.is_empty() {
                return Err(Error::invalid("mini-batch must not be empty"));
            }
            if let Some(&bad) = b.iter().find(|&&i| i >= data.len()) {
                return Err(Error::invalid(format!("batch index {bad} out of range")));
            }
        }
        let count = batch.map_or(data.len(), <[usize]>::len);
        let index = |k: usize| batch.map_or(k, |b| b[k]);
        let d = data.dim();
        let mut g = vec![0.0; w.len()];
        match *self {
            LossModel::MseLinear if batch.is_none() && data.len() >= d => {
                // (2/D)(XᵀX w − Xᵀy) from cached moments
                let m = data.moments();
                for (r, gr) in g.iter_mut().enumerate() {
                    *gr = dot(m.xtx.row(r), w.as_slice()) - m.xty[r];
                }
                let s = 2.0 / count as f64;
                g.iter_mut().for_each(|v| *v *= s);
            }
            LossModel::MseLinear => {
                for k in 0..count {
                    let i = index(k);
                    let x = data.row(i);
                    let r = dot(x, w.as_slice()) - data.label(i);
                    for (gj, xj) in g.iter_mut().zip(x) {
                        *gj += r * xj;
                    }
                }
                let s = 2.0 / count as f64;
                g.iter_mut().for_each(|v| *v *= s);
            }
            LossModel::MultinomialLogistic { classes, reg } => {
                let mut logits = vec![0.0; classes];
                for k in 0..count {
                    let i = index(k);
                    let y = class_index(data.label(i), classes)?;
                    let x = data.row(i);
                    fill_logits(x, w.as_slice(), d, &mut logits);
                    softmax_in_place(&mut logits);
                    for (c, p) in logits.iter().enumerate() {
                        let coef = p - if c == y { 1.0 } else { 0.0 };
                        for (gj, xj) in g[c * d..(c + 1) * d].iter_mut().zip(x) {
                            *gj += coef * xj;
                        }
                    }
                }
                let s = 1.0 / count as f64;
                for (gj, wj) in g.iter_mut().zip(w.as_slice()) {
                    *gj = *gj * s + reg * wj;
                }
            }
        }
        Ok(ModelVector::from_vec(g))
    }

    /// Fraction of correctly classified samples; `None` for regression.
    pub fn accuracy(&self, w: &ModelVector, data: &UEDataset) -> Result<Option<f64>> {
        self.check(w, data)?;
        let LossModel::MultinomialLogistic { classes, .. } = *self else {
            return Ok(None);
        };
        let d = data.dim();
        let mut logits = vec![0.0; classes];
        let mut correct = 0usize;
        for i in 0..data.len() {
            let y = class_index(data.label(i), classes)?;
            fill_logits(data.row(i), w.as_slice(), d, &mut logits);
            let pred = logits
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (c, &v)| {
                    if v > best.1 {
                        (c, v)
                    } else {
                        best
                    }
                })
                .0;
            if pred == y {
                correct += 1;
            }
        }
        Ok(Some(correct as f64 / data.len() as f64))
    }
}

/// Inner product with four independent partial sums.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    let tail: f64 = ra.iter().zip(rb).map(|(x, y)| x * y).sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn class_index(label: f64, classes: usize) -> Result<usize> {
    if label >= 0.0 && label.fract() == 0.0 && (label as usize) < classes {
        Ok(label as usize)
    } else {
        Err(Error::invalid(format!(
            "label {label} is not a class index in [0, {classes})"
        )))
    }
}

fn fill_logits(x: &[f64], w: &[f64], d: usize, out: &mut [f64]) {
    for (c, z) in out.iter_mut().enumerate() {
        *z = dot(x, &w[c * d..(c + 1) * d]);
    }
}

fn log_sum_exp(z: &[f64]) -> f64 {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + z.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

// max-shifted to avoid overflow
fn softmax_in_place(z: &mut [f64]) {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for v in z.iter_mut() {
        *v = (*v - m).exp();
        total += *v;
    }
    z.iter_mut().for_each(|v| *v /= total);
}
