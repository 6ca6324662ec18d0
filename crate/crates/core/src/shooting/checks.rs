//! Consistency checks on a computed radial solution.

use serde::{Deserialize, Serialize};

use super::system::EmdenFowlerSystem;
use super::RadialSolution;
use crate::error::{Error, Result};
use crate::quartic::shifted_operator_coeffs;
use crate::spectrum::Spectrum;
use crate::stencil::central_weights;

/// Stencil half-width used for the residual: 9 points, 6th order for `∂⁴`.
const RESIDUAL_HALF: usize = 4;

/// `max |Q₄(m − ∂ₛ)W − W^p| / max W^p` over interior nodes, with `W = L + Y`
/// sampled at spacing `ds` and derivatives from 9-point central stencils.
pub fn emden_fowler_residual_grid(n: u32, p: f64, amplitude: f64, y: &[f64], ds: f64) -> Result<f64> {
    let interior = y.len().saturating_sub(2 * RESIDUAL_HALF);
    if interior < 9 {
        return Err(Error::GridTooCoarse(interior));
    }
    let c = shifted_operator_coeffs(n, 4.0 / (p - 1.0));
    let sys = EmdenFowlerSystem::new(n, p, amplitude);
    let w = central_weights(RESIDUAL_HALF, ds, 4);
    let (mut worst, mut scale) = (0.0f64, 0.0f64);
    for i in RESIDUAL_HALF..y.len() - RESIDUAL_HALF {
        let window = &y[i - RESIDUAL_HALF..=i + RESIDUAL_HALF];
        let mut lhs = c[0] * y[i];
        for k in 1..=4 {
            let d: f64 = w[k].iter().zip(window).map(|(a, b)| a * b).sum();
            lhs += c[k] * d;
        }
        worst = worst.max((lhs - sys.increment(y[i])).abs());
        scale = scale.max((amplitude + y[i]).abs().powf(p));
    }
    Ok(worst / scale)
}

pub fn emden_fowler_residual(sol: &RadialSolution) -> Result<f64> {
    emden_fowler_residual_grid(sol.params.n, sol.params.p, sol.amplitude, &sol.y, sol.ds)
}

/// `−∫ₛ^S e^{λ₄(s−τ)}Z(τ)dτ` minus the tail beyond `S` for pure `e^{λ₃τ}`
/// decay, on every node of `z` (the last entry is `S`). Composite Simpson
/// over node pairs, both parities.
pub fn integrate_z(z: &[f64], ds: f64, lambda4: f64, lambda3: f64) -> Vec<f64> {
    let n = z.len();
    let mut acc = vec![0.0; n];
    if n == 0 {
        return acc;
    }
    let e1 = (-lambda4 * ds).exp();
    let e2 = e1 * e1;
    let last = n - 1;
    acc[last] = z[last] / (lambda4 - lambda3);
    if n >= 3 {
        let f = [z[last - 2] / e1, z[last - 1], z[last] * e1];
        acc[last - 1] = e1 * acc[last] + ds * (-f[0] + 8.0 * f[1] + 5.0 * f[2]) / 12.0;
    } else if n == 2 {
        acc[0] = e1 * acc[1] + 0.5 * ds * (z[0] + e1 * z[1]);
    }
    for j in (0..last.saturating_sub(1)).rev() {
        acc[j] = e2 * acc[j + 2] + ds / 3.0 * (z[j] + 4.0 * e1 * z[j + 1] + e2 * z[j + 2]);
    }
    acc.iter().map(|a| -a).collect()
}

/// Largest deviation of `Y` from its reconstruction out of `Z`, over the
/// resolved part of the `s` chart, normalised by the largest `|Y|` there.
///
/// `Z` is taken from the solution; the kernel uses `spec.λ₄`, so a perturbed
/// spectrum shows up as a growing deviation.
pub fn y_integral_identity_check(sol: &RadialSolution, spec: &Spectrum) -> f64 {
    let len = sol.len();
    if len < 6 {
        return f64::NAN;
    }
    let (first, last) = (2, len - 3);
    let zmax = sol.z[first..=last].iter().fold(0.0f64, |a, z| a.max(z.abs()));
    let peak = first
        + sol.z[first..=last].iter().position(|z| z.abs() == zmax).unwrap_or(0);
    let cut = (peak..=last).find(|&i| sol.z[i].abs() < 1e-12 * zmax).unwrap_or(last);
    let lo = sol.switch_index.clamp(first, cut);
    if cut <= lo + 2 {
        return f64::NAN;
    }
    let yhat = integrate_z(&sol.z[lo..=cut], sol.ds, spec.l4(), spec.l3());
    let window = lo..cut;
    let ymax = window.clone().fold(0.0f64, |a, i| a.max(sol.y[i].abs()));
    let dev = window.fold(0.0f64, |a, i| a.max((yhat[i - lo] - sol.y[i]).abs()));
    dev / ymax
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecaySlope {
    pub slope: f64,
    pub s_lo: f64,
    pub s_hi: f64,
    /// Whether the fit was of `ln(|Y|/s)` rather than `ln|Y|`.
    pub log_corrected: bool,
}

/// Least-squares slope of `ln|Y|` (or `ln(|Y|/s)` when `log_corrected`)
/// against `s` over the last decade of `r`.
pub fn decay_slope(sol: &RadialSolution, log_corrected: bool) -> DecaySlope {
    let s_hi = *sol.s_grid.last().unwrap();
    let s_lo = s_hi - std::f64::consts::LN_10;
    let pts: Vec<(f64, f64)> = sol
        .s_grid
        .iter()
        .zip(&sol.y)
        .filter(|(s, y)| **s >= s_lo - 1e-12 && **y != 0.0)
        .map(|(&s, &y)| {
            let v = if log_corrected { (y.abs() / s).ln() } else { y.abs().ln() };
            (s, v)
        })
        .collect();
    let k = pts.len() as f64;
    let (ms, mv) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 / k, a.1 + p.1 / k));
    let (sxy, sxx) = pts
        .iter()
        .fold((0.0, 0.0), |a, p| (a.0 + (p.0 - ms) * (p.1 - mv), a.1 + (p.0 - ms).powi(2)));
    DecaySlope { slope: sxy / sxx, s_lo, s_hi, log_corrected }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    /// Largest `|r^m φ/L − 1|` over the final part of the grid.
    pub max_deviation: f64,
    /// Whether the deviation never increases across that part.
    pub decreasing: bool,
}

/// `|r^m φ(r)/L − 1|` over the last `fraction` of the grid.
pub fn limit_deviation(sol: &RadialSolution, fraction: f64) -> LimitReport {
    let len = sol.len();
    let from = len - ((len as f64 * fraction).ceil() as usize).clamp(1, len);
    let dev: Vec<f64> = sol.w[from..].iter().map(|w| (w / sol.amplitude - 1.0).abs()).collect();
    LimitReport {
        max_deviation: dev.iter().cloned().fold(0.0, f64::max),
        decreasing: dev.windows(2).all(|p| p[1] <= p[0]),
    }
}
