//! Heterogeneous synthetic datasets and CSV dataset I/O.
//!
//! UE `i` draws features from `N(0, σ_i Σ)` with `σ_i ~ U(scale_range)` and a
//! diagonal `Σ_jj = j^{-p}`, `p = ln ρ / ln d`, so `Σ_11 / Σ_dd = ρ`. Labels come
//! from a linear model shared by every UE plus Gaussian noise. Sample counts
//! follow `D_n = min + ⌊(max − min)·u^a⌋`, `u ~ U(0,1)`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{assign_weights, UEDataset};
use crate::error::{Error, Result};
use crate::math::ModelVector;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub n_users: usize,
    pub dim: usize,
    pub target_rho: f64,
    /// Inclusive `[min, max]` total samples per UE, before the split.
    pub size_range: [usize; 2],
    /// Exponent `a` of the size law.
    #[serde(default = "default_size_law")]
    pub size_law: f64,
    /// Training fraction of each UE's samples.
    #[serde(default = "default_split")]
    pub split: f64,
    pub seed: u64,
    /// Range of the per-UE covariance multiplier `σ_i`.
    #[serde(default = "default_scale_range")]
    pub scale_range: [f64; 2],
    /// Variance of the additive label noise.
    #[serde(default = "default_noise_var")]
    pub noise_var: f64,
}

fn default_size_law() -> f64 {
    3.0
}
fn default_split() -> f64 {
    0.75
}
fn default_scale_range() -> [f64; 2] {
    [1.0, 10.0]
}
fn default_noise_var() -> f64 {
    0.05
}

impl SyntheticSpec {
    /// Defaults for everything except the user count, dimension, ρ, sizes and seed.
    pub fn new(
        n_users: usize,
        dim: usize,
        target_rho: f64,
        size_range: [usize; 2],
        seed: u64,
    ) -> Self {
        Self {
            n_users,
            dim,
            target_rho,
            size_range,
            size_law: default_size_law(),
            split: default_split(),
            seed,
            scale_range: default_scale_range(),
            noise_var: default_noise_var(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_users == 0 {
            return Err(Error::invalid("n_users must be at least 1"));
        }
        if self.dim == 0 {
            return Err(Error::invalid("dim must be at least 1"));
        }
        if !(self.target_rho >= 1.0 && self.target_rho.is_finite()) {
            return Err(Error::invalid("target_rho must be a finite value >= 1"));
        }
        let [lo, hi] = self.size_range;
        if lo > hi {
            return Err(Error::invalid(format!(
                "size_range min {lo} exceeds max {hi}"
            )));
        }
        if lo < 2 {
            return Err(Error::invalid(
                "size_range min must be at least 2 so both splits are non-empty",
            ));
        }
        if !(self.size_law > 0.0 && self.size_law.is_finite()) {
            return Err(Error::invalid("size_law exponent must be positive"));
        }
        if !(self.split > 0.0 && self.split < 1.0) {
            return Err(Error::invalid("split must lie in (0, 1)"));
        }
        let [s_lo, s_hi] = self.scale_range;
        if !(s_lo > 0.0 && s_lo <= s_hi && s_hi.is_finite()) {
            return Err(Error::invalid("scale_range must satisfy 0 < min <= max"));
        }
        if !(self.noise_var >= 0.0 && self.noise_var.is_finite()) {
            return Err(Error::invalid("noise_var must be >= 0"));
        }
        Ok(())
    }

    /// Diagonal of `Σ`: `Σ_jj = j^{-p}` for `j = 1..=d`.
    pub fn covariance_diagonal(&self) -> Vec<f64> {
        let p = if self.dim > 1 {
            self.target_rho.ln() / (self.dim as f64).ln()
        } else {
            0.0
        };
        (1..=self.dim).map(|j| (j as f64).powf(-p)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct SyntheticData {
    pub train: Vec<UEDataset>,
    pub test: Vec<UEDataset>,
    pub w_true: ModelVector,
    /// Per-UE covariance multipliers `σ_i`.
    pub scales: Vec<f64>,
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticData> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let d = spec.dim;
    let sigma = spec.covariance_diagonal();
    let w_true: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
    let noise_std = spec.noise_var.sqrt();
    let [lo, hi] = spec.size_range;
    let [s_lo, s_hi] = spec.scale_range;

    let mut train = Vec::with_capacity(spec.n_users);
    let mut test = Vec::with_capacity(spec.n_users);
    let mut scales = Vec::with_capacity(spec.n_users);
    for _ in 0..spec.n_users {
        let scale = if s_lo < s_hi {
            rng.gen_range(s_lo..s_hi)
        } else {
            s_lo
        };
        let u: f64 = rng.gen();
        let size = lo + ((hi - lo) as f64 * u.powf(spec.size_law)).floor() as usize;
        let size = size.min(hi);
        let std_dev: Vec<f64> = sigma.iter().map(|s| (scale * s).sqrt()).collect();

        let mut features = Vec::with_capacity(size * d);
        let mut labels = Vec::with_capacity(size);
        for _ in 0..size {
            let start = features.len();
            for sd in &std_dev {
                let z: f64 = rng.sample(StandardNormal);
                features.push(sd * z);
            }
            let x = &features[start..];
            let eps: f64 = StandardNormal.sample(&mut rng);
            let y = x.iter().zip(&w_true).map(|(a, b)| a * b).sum::<f64>() + noise_std * eps;
            labels.push(y);
        }

        let mut order: Vec<usize> = (0..size).collect();
        order.shuffle(&mut rng);
        let n_train = ((spec.split * size as f64).round() as usize).clamp(1, size - 1);
        let full = UEDataset::new(features, labels, d)?;
        train.push(full.select(&order[..n_train])?);
        test.push(full.select(&order[n_train..])?);
        scales.push(scale);
    }
    assign_weights(&mut train);
    assign_weights(&mut test);
    Ok(SyntheticData {
        train,
        test,
        w_true: ModelVector::from_vec(w_true),
        scales,
    })
}

/// How UE weights are derived when loading.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightRule {
    /// `p_n = D_n / D` from row counts.
    #[default]
    SampleCount,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvSchema {
    pub label_column: String,
    #[serde(default)]
    pub weight_rule: WeightRule,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            label_column: "label".into(),
            weight_rule: WeightRule::SampleCount,
        }
    }
}

/// Format a float with 17 significant digits (lossless for f64).
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Render one dataset as CSV: header `f0,…,f{d-1},label`, one sample per row.
pub fn dataset_to_csv(ds: &UEDataset) -> String {
    let d = ds.dim();
    let mut out = String::new();
    let header: Vec<String> = (0..d)
        .map(|j| format!("f{j}"))
        .chain(["label".into()])
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for i in 0..ds.len() {
        let row: Vec<String> = ds
            .row(i)
            .iter()
            .copied()
            .chain([ds.label(i)])
            .map(fmt_f64)
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// File name used for UE `index` inside a dataset directory.
pub fn ue_file_name(index: usize) -> String {
    format!("ue_{index:04}.csv")
}

/// Write one CSV per UE into `dir`, returning the paths in UE order.
pub fn write_csv_dir(dir: &Path, datasets: &[UEDataset]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::with_capacity(datasets.len());
    for (i, ds) in datasets.iter().enumerate() {
        let path = dir.join(ue_file_name(i));
        let mut f = fs::File::create(&path)?;
        f.write_all(dataset_to_csv(ds).as_bytes())?;
        paths.push(path);
    }
    Ok(paths)
}

fn load_one(path: &Path, schema: &CsvSchema) -> Result<UEDataset> {
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| parse_err(1, e.to_string()))?;
    let headers = reader
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    if headers.is_empty() {
        return Err(Error::Schema {
            path: path.to_path_buf(),
            msg: "missing header row".into(),
        });
    }
    let label_col = headers
        .iter()
        .position(|h| h == schema.label_column)
        .ok_or_else(|| Error::Schema {
            path: path.to_path_buf(),
            msg: format!("no label column named {:?}", schema.label_column),
        })?;
    let width = headers.len();
    if width < 2 {
        return Err(Error::Schema {
            path: path.to_path_buf(),
            msg: "need at least one feature column besides the label".into(),
        });
    }

    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let line = k + 2;
        let record = record.map_err(|e| parse_err(line, e.to_string()))?;
        if record.len() != width {
            return Err(parse_err(
                line,
                format!("expected {width} columns, found {}", record.len()),
            ));
        }
        for (c, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| {
                parse_err(
                    line,
                    format!("non-numeric cell {cell:?} in column {}", c + 1),
                )
            })?;
            if !v.is_finite() {
                return Err(parse_err(line, format!("non-finite cell {cell:?}")));
            }
            if c == label_col {
                labels.push(v);
            } else {
                features.push(v);
            }
        }
    }
    if labels.is_empty() {
        return Err(Error::Schema {
            path: path.to_path_buf(),
            msg: "file has no samples".into(),
        });
    }
    UEDataset::new(features, labels, width - 1)
}

/// Load one dataset per file, keeping the given order, and recompute weights.
pub fn load_csv(paths: &[PathBuf], schema: &CsvSchema) -> Result<Vec<UEDataset>> {
    if paths.is_empty() {
        return Err(Error::invalid("no dataset files given"));
    }
    let mut datasets = paths
        .par_iter()
        .map(|p| load_one(p, schema))
        .collect::<Result<Vec<_>>>()?;
    let dim = datasets[0].dim();
    for (ds, path) in datasets.iter().zip(paths) {
        if ds.dim() != dim {
            return Err(Error::Schema {
                path: path.clone(),
                msg: format!("{} feature columns, expected {dim}", ds.dim()),
            });
        }
    }
    match schema.weight_rule {
        WeightRule::SampleCount => assign_weights(&mut datasets),
    }
    Ok(datasets)
}

/// Load every `*.csv` in `dir`, ordered by file name.
pub fn load_csv_dir(dir: &Path, schema: &CsvSchema) -> Result<Vec<UEDataset>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    paths.sort();
    load_csv(&paths, schema)
}

/// Record of what a generation run produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub spec: SyntheticSpec,
    pub seed: u64,
    pub dim: usize,
    pub task: String,
    pub train_sizes: Vec<usize>,
    pub test_sizes: Vec<usize>,
    pub scales: Vec<f64>,
}

impl DatasetManifest {
    pub fn new(spec: &SyntheticSpec, data: &SyntheticData) -> Self {
        Self {
            spec: spec.clone(),
            seed: spec.seed,
            dim: spec.dim,
            task: "regression".into(),
            train_sizes: data.train.iter().map(UEDataset::len).collect(),
            test_sizes: data.test.iter().map(UEDataset::len).collect(),
            scales: data.scales.clone(),
        }
    }
}
