use std::f64::consts::E;

use crate::error::{Error, Result};

const MAX_HALLEY_ITERS: usize = 50;

/// Principal branch `W₀(x)` of the Lambert W function (`w·eʷ = x`, `w ≥ −1`).
///
/// Halley iteration from a branch-point series, `ln(1+x)` or asymptotic
/// initial guess depending on the region of `x`.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::invalid("lambert W of NaN"));
    }
    let branch = -1.0 / E;
    if x <= branch {
        // allow a few ulps of rounding in the caller's −1/e
        if x - branch >= -4.0 * f64::EPSILON {
            return Ok(-1.0);
        }
        return Err(Error::Domain(x));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }

    let q = 2.0 * (E * x + 1.0);
    let mut w = if q < 0.5 {
        let p = q.max(0.0).sqrt();
        let series = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0))));
        if p < 1e-3 {
            return Ok(series);
        }
        series
    } else if x < 3.0 {
        x.ln_1p()
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };

    for _ in 0..MAX_HALLEY_ITERS {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if denom == 0.0 || !denom.is_finite() {
            break;
        }
        let step = f / denom;
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w)
}
