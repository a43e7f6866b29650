use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Local mini-batch size, or the whole local dataset.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BatchRepr", into = "BatchRepr")]
pub enum Batch {
    #[default]
    Full,
    Size(usize),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum BatchRepr {
    Size(usize),
    Name(String),
}

impl TryFrom<BatchRepr> for Batch {
    type Error = String;

    fn try_from(r: BatchRepr) -> Result<Self, String> {
        match r {
            BatchRepr::Size(0) => Err("batch size must be at least 1".into()),
            BatchRepr::Size(n) => Ok(Batch::Size(n)),
            BatchRepr::Name(s) if s.eq_ignore_ascii_case("full") => Ok(Batch::Full),
            BatchRepr::Name(s) => Err(format!(
                "batch must be FULL or a positive integer, got {s:?}"
            )),
        }
    }
}

impl From<Batch> for BatchRepr {
    fn from(b: Batch) -> Self {
        match b {
            Batch::Full => BatchRepr::Name("FULL".into()),
            Batch::Size(n) => BatchRepr::Size(n),
        }
    }
}

impl fmt::Display for Batch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Batch::Full => f.write_str("FULL"),
            Batch::Size(n) => write!(f, "{n}"),
        }
    }
}

/// Hyper-parameters of one training run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    /// Hyper-learning rate η.
    pub eta: f64,
    /// Local accuracy θ ∈ [0, 1].
    pub theta: f64,
    #[serde(rename = "K_g")]
    pub k_g: usize,
    /// Cap on local iterations per global round.
    #[serde(rename = "K_l")]
    pub k_l: usize,
    /// Local learning rate.
    pub h: f64,
    #[serde(default)]
    pub batch: Batch,
    /// UEs sampled per round.
    #[serde(rename = "S")]
    pub subset: usize,
    pub seed: u64,
}

impl TrainConfig {
    pub fn validate(&self, n_users: usize) -> Result<()> {
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::invalid(format!(
                "theta must lie in [0,1], got {}",
                self.theta
            )));
        }
        // η = 0 is accepted: it freezes the model and is a useful sanity run.
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(Error::invalid(format!(
                "eta must be finite and >= 0, got {}",
                self.eta
            )));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::invalid(format!(
                "h must be positive, got {}",
                self.h
            )));
        }
        if self.k_l == 0 {
            return Err(Error::invalid("K_l must be at least 1"));
        }
        if self.subset == 0 || self.subset > n_users {
            return Err(Error::invalid(format!(
                "S must lie in [1, {n_users}], got {}",
                self.subset
            )));
        }
        if let Batch::Size(0) = self.batch {
            return Err(Error::invalid("batch size must be at least 1"));
        }
        Ok(())
    }
}
