//! Per-UE local datasets.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::linalg::SymMatrix;

/// One UE's local samples, stored row-major.
///
/// Labels are real targets for regression and class indices (stored as
/// integral `f64`) for multinomial classification.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UEDataset {
    features: Vec<f64>,
    labels: Vec<f64>,
    dim: usize,
    /// Aggregation weight `p_n = D_n / D`.
    pub weight: f64,
    #[serde(skip)]
    moments: OnceLock<Moments>,
}

/// `XᵀX` and `Xᵀy`, computed on first use, plus an anchor point `ŵ`
/// (the local least-squares solution when `XᵀX` is positive definite) with
/// its exact squared-error sum and `XᵀXŵ − Xᵀy`.
#[derive(Clone, Debug)]
pub(crate) struct Moments {
    pub(crate) xtx: SymMatrix,
    pub(crate) xty: Vec<f64>,
    pub(crate) anchor: Vec<f64>,
    pub(crate) anchor_sse: f64,
    pub(crate) anchor_residual: Vec<f64>,
}

impl PartialEq for UEDataset {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.weight == other.weight
            && self.labels == other.labels
            && self.features == other.features
    }
}

impl UEDataset {
    pub fn new(features: Vec<f64>, labels: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("feature dimension must be at least 1"));
        }
        if labels.is_empty() {
            return Err(Error::invalid("dataset must contain at least one sample"));
        }
        if features.len() != labels.len() * dim {
            return Err(Error::DimensionMismatch {
                expected: labels.len() * dim,
                actual: features.len(),
            });
        }
        if features.iter().chain(&labels).any(|v| !v.is_finite()) {
            return Err(Error::invalid("dataset contains non-finite values"));
        }
        Ok(Self {
            features,
            labels,
            dim,
            weight: 0.0,
            moments: OnceLock::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn label(&self, i: usize) -> f64 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub(crate) fn moments(&self) -> &Moments {
        self.moments.get_or_init(|| {
            let mut xty = vec![0.0; self.dim];
            for i in 0..self.len() {
                let y = self.labels[i];
                for (acc, x) in xty.iter_mut().zip(self.row(i)) {
                    *acc += x * y;
                }
            }
            let xtx = SymMatrix::gram(self, 1.0);
            let anchor = match xtx.cholesky() {
                Some(ch) => {
                    let mut w = xty.clone();
                    ch.solve_in_place(&mut w);
                    w
                }
                None => vec![0.0; self.dim],
            };
            let anchor_sse = (0..self.len())
                .map(|i| {
                    let r = crate::math::dot(self.row(i), &anchor) - self.labels[i];
                    r * r
                })
                .sum();
            let anchor_residual = (0..self.dim)
                .map(|r| crate::math::dot(xtx.row(r), &anchor) - xty[r])
                .collect();
            Moments {
                xtx,
                xty,
                anchor,
                anchor_sse,
                anchor_residual,
            }
        })
    }

    /// Subset of rows, in the order given.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut features = Vec::with_capacity(indices.len() * self.dim);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.len() {
                return Err(Error::invalid(format!("sample index {i} out of range")));
            }
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Self::new(features, labels, self.dim)
    }
}

/// Recompute `p_n = D_n / D` from sample counts.
pub fn assign_weights(datasets: &mut [UEDataset]) {
    let total: usize = datasets.iter().map(UEDataset::len).sum();
    for ds in datasets.iter_mut() {
        ds.weight = ds.len() as f64 / total as f64;
    }
}

/// Check that every dataset shares one feature dimension and return it.
pub fn common_dim(datasets: &[UEDataset]) -> Result<usize> {
    let first = datasets
        .first()
        .ok_or_else(|| Error::invalid("at least one UE dataset is required"))?;
    for ds in &datasets[1..] {
        if ds.dim() != first.dim() {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                actual: ds.dim(),
            });
        }
    }
    Ok(first.dim())
}
