use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{validate_all, SystemParams, UEProfile};
use crate::error::{Error, Result};

const BITS_PER_MB: f64 = 8e6;
/// −40 dB reference gain at 1 m.
const G0: f64 = 1e-4;

/// Learning-side constants used when chaining the subproblems.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearningParams {
    /// Condition number `L/β`.
    pub rho: f64,
    /// `F(w⁰) − F*` over the target accuracy ε.
    #[serde(default = "default_gap")]
    pub gap0_over_eps: f64,
}

fn default_gap() -> f64 {
    std::f64::consts::E
}

impl Default for LearningParams {
    fn default() -> Self {
        Self {
            rho: 2.0,
            gap0_over_eps: default_gap(),
        }
    }
}

/// A complete allocation problem: system parameters and UE profiles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub system: SystemParams,
    #[serde(default)]
    pub learning: Option<LearningParams>,
    pub ues: Vec<UEProfile>,
}

impl Instance {
    pub fn validate(&self) -> Result<()> {
        validate_all(&self.ues, &self.system)?;
        if let Some(l) = &self.learning {
            if !(l.rho >= 1.0 && l.rho.is_finite()) {
                return Err(Error::invalid(format!("rho must be >= 1, got {}", l.rho)));
            }
            if !(l.gap0_over_eps >= 1.0 && l.gap0_over_eps.is_finite()) {
                return Err(Error::invalid(format!(
                    "gap0_over_eps must be >= 1, got {}",
                    l.gap0_over_eps
                )));
            }
        }
        Ok(())
    }

    /// Read a TOML (`.toml`) or JSON (anything else) instance file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let schema = |msg: String| Error::Schema {
            path: path.to_path_buf(),
            msg,
        };
        let inst: Instance = if path.extension().is_some_and(|e| e == "toml") {
            toml::from_str(&text).map_err(|e| schema(e.to_string()))?
        } else {
            serde_json::from_str(&text).map_err(|e| schema(e.to_string()))?
        };
        inst.validate().map_err(|e| schema(e.to_string()))?;
        Ok(inst)
    }
}

/// Mean of the exponentially distributed gain at `distance` metres.
fn mean_gain(distance: f64) -> f64 {
    G0 * distance.powi(-4)
}

fn base_system(n: usize) -> SystemParams {
    SystemParams {
        bandwidth: 1e6,
        n0: 1e-10,
        kappa: 1.0,
        n_users: n,
    }
}

/// Random UEs with the five-UE illustration parameters: distance 2–50 m,
/// 5–10 MB of data, 10–30 cycles/bit, `f_max` in 1–2 GHz.
pub fn reference_instance(n_users: usize, seed: u64) -> Result<Instance> {
    if n_users == 0 {
        return Err(Error::invalid("n_users must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ues = (0..n_users)
        .map(|_| {
            let distance = rng.gen_range(2.0..50.0);
            let d_mb = rng.gen_range(5.0..10.0);
            let c = rng.gen_range(10.0..30.0);
            let f_max = rng.gen_range(1.0e9..2.0e9);
            UEProfile {
                c_n: c,
                d_n: d_mb * BITS_PER_MB,
                alpha_n: 2e-28,
                f_min: 0.3e9,
                f_max,
                hbar_n: mean_gain(distance),
                p_min: 0.2,
                p_max: 1.0,
                s_n: 25_000.0,
            }
        })
        .collect();
    Ok(Instance {
        system: base_system(n_users),
        learning: None,
        ues,
    })
}

/// `n` values evenly spread over `[lo, hi]` in random order.
fn spread(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut v: Vec<f64> = if n == 1 {
        vec![0.5 * (lo + hi)]
    } else {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    };
    v.shuffle(rng);
    v
}

/// Heterogeneity study instance: `f_max = 2 GHz`, `c = 20` cycles/bit,
/// data sizes with ratio `data_ratio = D_min/D_max` and mean 7.5 MB,
/// distances with ratio `distance_ratio` and mean 26 m.
///
/// Sizes and distances are evenly spaced between their extremes so the
/// means are exact; `seed` only fixes the assignment to UEs. Distances use
/// their own stream, so instances differing only in `data_ratio` share a
/// channel.
pub fn heterogeneous_instance(
    n_users: usize,
    seed: u64,
    data_ratio: f64,
    distance_ratio: f64,
) -> Result<Instance> {
    if n_users == 0 {
        return Err(Error::invalid("n_users must be positive"));
    }
    for (name, r) in [
        ("data_ratio", data_ratio),
        ("distance_ratio", distance_ratio),
    ] {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::invalid(format!(
                "{name} must lie in (0, 1], got {r}"
            )));
        }
    }
    let d_max = 2.0 * 7.5 / (1.0 + data_ratio);
    let dist_max = 2.0 * 26.0 / (1.0 + distance_ratio);
    let mut data_rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chan_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED_C4A7);
    let sizes = spread(&mut data_rng, n_users, data_ratio * d_max, d_max);
    let distances = spread(&mut chan_rng, n_users, distance_ratio * dist_max, dist_max);
    let ues = sizes
        .iter()
        .zip(&distances)
        .map(|(&mb, &dist)| UEProfile {
            c_n: 20.0,
            d_n: mb * BITS_PER_MB,
            alpha_n: 2e-28,
            f_min: 0.3e9,
            f_max: 2.0e9,
            hbar_n: mean_gain(dist),
            p_min: 0.2,
            p_max: 1.0,
            s_n: 25_000.0,
        })
        .collect();
    Ok(Instance {
        system: base_system(n_users),
        learning: None,
        ues,
    })
}
