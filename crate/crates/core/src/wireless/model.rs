use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::lambert_w0;

/// Computing and radio profile of one UE.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UEProfile {
    /// CPU cycles per bit.
    pub c_n: f64,
    /// Local data size in bits.
    #[serde(rename = "D_n")]
    pub d_n: f64,
    /// Effective capacitance, energy per round is `(α/2)·c·D·f²`.
    pub alpha_n: f64,
    pub f_min: f64,
    pub f_max: f64,
    /// Mean channel gain.
    pub hbar_n: f64,
    pub p_min: f64,
    pub p_max: f64,
    /// Update size in nats.
    pub s_n: f64,
}

impl UEProfile {
    /// Cycles per local round, `c_n·D_n`.
    pub fn load(&self) -> f64 {
        self.c_n * self.d_n
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("c_n", self.c_n),
            ("D_n", self.d_n),
            ("f_min", self.f_min),
            ("f_max", self.f_max),
            ("hbar_n", self.hbar_n),
            ("p_min", self.p_min),
            ("p_max", self.p_max),
            ("s_n", self.s_n),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if !(self.alpha_n >= 0.0 && self.alpha_n.is_finite()) {
            return Err(Error::invalid(format!(
                "alpha_n must be >= 0, got {}",
                self.alpha_n
            )));
        }
        if self.f_min > self.f_max {
            return Err(Error::invalid(format!(
                "f_min {} exceeds f_max {}",
                self.f_min, self.f_max
            )));
        }
        if self.p_min > self.p_max {
            return Err(Error::invalid(format!(
                "p_min {} exceeds p_max {}",
                self.p_min, self.p_max
            )));
        }
        Ok(())
    }
}

/// Shared radio parameters and the energy/time weight κ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    /// Bandwidth in Hz.
    #[serde(rename = "B")]
    pub bandwidth: f64,
    /// Background noise power in W.
    #[serde(rename = "N0")]
    pub n0: f64,
    /// Weight κ in J/s.
    pub kappa: f64,
    #[serde(rename = "N")]
    pub n_users: usize,
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("B", self.bandwidth),
            ("N0", self.n0),
            ("kappa", self.kappa),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn with_kappa(&self, kappa: f64) -> Self {
        Self {
            kappa,
            ..self.clone()
        }
    }
}

pub(crate) fn validate_all(ues: &[UEProfile], sys: &SystemParams) -> Result<()> {
    sys.validate()?;
    if ues.is_empty() {
        return Err(Error::invalid("instance has no UEs"));
    }
    if sys.n_users != ues.len() {
        return Err(Error::invalid(format!(
            "N = {} but {} UE profiles were given",
            sys.n_users,
            ues.len()
        )));
    }
    for (i, ue) in ues.iter().enumerate() {
        ue.validate()
            .map_err(|e| Error::invalid(format!("UE {i}: {e}")))?;
    }
    Ok(())
}

/// Computation energy per local round, `(α/2)·c·D·f²`.
pub fn energy_cp(ue: &UEProfile, f: f64) -> f64 {
    0.5 * ue.alpha_n * ue.load() * f * f
}

/// Transmit power needed to send `s_n` nats in `tau` seconds.
pub fn power_of_tau(ue: &UEProfile, sys: &SystemParams, tau: f64) -> f64 {
    sys.n0 / ue.hbar_n * (ue.s_n / (tau * sys.bandwidth)).exp_m1()
}

/// Upload energy `τ·p(s/τ)`.
pub fn energy_co(ue: &UEProfile, sys: &SystemParams, tau: f64) -> f64 {
    tau * power_of_tau(ue, sys, tau)
}

/// `∂E_co/∂τ`, always negative.
pub fn energy_co_slope(ue: &UEProfile, sys: &SystemParams, tau: f64) -> f64 {
    -g_inv(ue, sys, tau)
}

/// `(τ_min, τ_max)`: upload times at `p_max` and `p_min`.
pub fn tau_bounds(ue: &UEProfile, sys: &SystemParams) -> (f64, f64) {
    let snr = ue.hbar_n / sys.n0;
    let rate = |p: f64| sys.bandwidth * (snr * p).ln_1p();
    (ue.s_n / rate(ue.p_max), ue.s_n / rate(ue.p_min))
}

/// Unconstrained minimiser of `E_co(τ) + κτ`,
/// `(s/B) / (1 + W((κh̄/N0 − 1)/e))`.
pub fn g_fn(ue: &UEProfile, sys: &SystemParams, kappa: f64) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(Error::invalid(format!(
            "kappa must be positive, got {kappa}"
        )));
    }
    let q = kappa * ue.hbar_n / sys.n0;
    let w = lambert_w0((q - 1.0) / std::f64::consts::E)?;
    // x = s/(τB) = 1 + W solves e^x(x − 1) + 1 = q; polish against rounding
    // in (q − 1)/e when q is small.
    let mut x = 1.0 + w;
    for _ in 0..3 {
        let phi = excess(x) - q;
        let dphi = x * x.exp();
        if !(dphi > 0.0) {
            break;
        }
        let next = x - phi / dphi;
        if !(next > 0.0) || next == x {
            break;
        }
        x = next;
    }
    Ok(ue.s_n / (sys.bandwidth * x))
}

/// `−∂E_co/∂τ = (N0/h̄)(e^x(x − 1) + 1)` with `x = s/(τB)`.
pub fn g_inv(ue: &UEProfile, sys: &SystemParams, tau: f64) -> f64 {
    let x = ue.s_n / (tau * sys.bandwidth);
    sys.n0 / ue.hbar_n * excess(x)
}

/// `e^x(x − 1) + 1`; the Taylor series `Σ_{k≥2} (k−1)x^k/k!` for small `x`.
fn excess(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        let (mut term, mut sum) = (x, 0.0);
        for k in 2..=8 {
            term *= x / k as f64;
            sum += (k - 1) as f64 * term;
        }
        sum
    } else {
        x * x.exp() - x.exp_m1()
    }
}

/// `(L_cp, L_co)`: spread of computation and communication times.
pub fn heterogeneity(ues: &[UEProfile], sys: &SystemParams) -> Result<(f64, f64)> {
    validate_all(ues, sys)?;
    let max_fast = ues
        .iter()
        .map(|u| u.load() / u.f_max)
        .fold(f64::MIN, f64::max);
    let min_slow = ues
        .iter()
        .map(|u| u.load() / u.f_min)
        .fold(f64::MAX, f64::min);
    let bounds: Vec<(f64, f64)> = ues.iter().map(|u| tau_bounds(u, sys)).collect();
    let max_tau_min = bounds.iter().map(|b| b.0).fold(f64::MIN, f64::max);
    let min_tau_max = bounds.iter().map(|b| b.1).fold(f64::MAX, f64::min);
    Ok((max_fast / min_slow, max_tau_min / min_tau_max))
}
