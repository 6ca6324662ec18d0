//! Least-squares fits of the large-`s` expansion of `W = Y + L`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::regime::Regime;
use crate::error::{Error, Result};
use crate::lsq::solve_weighted;
use crate::shooting::RadialSolution;

use crate::spectrum::Spectrum;

/// Slack on the remainder slope, in units of `|λ₃|`.
pub const SLOPE_SLACK: f64 = 0.15;

/// Auto window: starts where `|Y| < WINDOW_START·L`.
pub const WINDOW_START: f64 = 1e-2;

/// Auto window: spans this many e-folds of the remainder relative to `Y`.
pub const WINDOW_SPAN: f64 = 18.0;

/// Nodes per block in the block-maximum slope estimate.
const SLOPE_BLOCK: usize = 10;

/// One term `c·s^q·e^{βs}` of the expansion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub name: String,
    pub exponent: f64,
    pub log_power: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub name: String,
    pub exponent: f64,
    pub log_power: u32,
    pub value: f64,
    pub std_error: f64,
    /// `|value| > std_error`.
    pub resolved: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionFit {
    pub regime: Regime,
    pub k: usize,
    pub window: (f64, f64),
    /// `a₀` first, then the terms in the order of the expansion.
    pub coefficients: Vec<Coefficient>,
    pub residual_slope: f64,
    pub remainder_exponent: f64,
    pub slack: f64,
    pub condition: f64,
    pub amplitude: f64,
    pub options: FitOptions,
}

impl ExpansionFit {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    pub fn a0(&self) -> f64 {
        self.coefficient("a0").map_or(f64::NAN, |c| c.value)
    }

    pub fn a0_relative_error(&self) -> f64 {
        (self.a0() - self.amplitude).abs() / self.amplitude
    }

    pub fn slope_within_bound(&self) -> bool {
        self.residual_slope <= self.remainder_exponent + self.slack
    }
}

/// The explicit terms of the expansion for `regime`, constant first.
pub fn basis(regime: Regime, spec: &Spectrum) -> Vec<Term> {
    let (l2, l3) = (spec.l2(), spec.l3());
    let t = |name: String, exponent: f64, log_power: u32| Term { name, exponent, log_power };
    let mut out = vec![t("a0".into(), 0.0, 0)];
    match regime {
        Regime::A { k } => {
            for j in 1..=k {
                out.push(t(format!("a{j}"), j as f64 * l3, 0));
            }
            out.push(t("b1".into(), l2, 0));
            out.push(t(format!("a{}", k + 1), (k + 1) as f64 * l3, 0));
        }
        Regime::B { k } => {
            for j in 1..k {
                out.push(t(format!("a{j}"), j as f64 * l3, 0));
            }
            out.push(t("b1".into(), k as f64 * l3, 1));
            out.push(t(format!("a{k}"), k as f64 * l3, 0));
        }
        Regime::C => {
            out.push(t("b1".into(), l3, 1));
            out.push(t("a1".into(), l3, 0));
            out.push(t("b2".into(), 2.0 * l3, 2));
        }
    }
    out
}

/// Default fit window: from where `|Y|` drops below `WINDOW_START·L`, over
/// `WINDOW_SPAN / |μ − λ₃|` units of `s` (the remainder-to-signal ratio falls by
/// `e^{WINDOW_SPAN}`), clipped to the grid.
pub fn default_window(sol: &RadialSolution, spec: &Spectrum, regime: Regime) -> Result<(f64, f64)> {
    let lo = sol
        .y
        .iter()
        .position(|y| y.abs() < WINDOW_START * sol.amplitude)
        .ok_or_else(|| Error::WindowTooShort("|Y| never drops below the window threshold".into()))?;
    let s_lo = sol.s_grid[lo];
    let mu = regime.remainder_exponent(spec);
    let width = WINDOW_SPAN / (mu - spec.l3()).abs();
    let s_hi = (s_lo + width).min(*sol.s_grid.last().unwrap());
    Ok((s_lo, s_hi))
}

/// Row weighting of the least-squares problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    /// Rows scaled by `e^{−μσ}` so the truncation remainder is uniform.
    Remainder,
    /// Rows scaled by `1/|Y|`: relative residuals.
    Relative,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitOptions {
    pub weighting: Weighting,
    /// Fold the shift caused by adding the next-order terms into the
    /// standard errors.
    pub truncation_aware: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { weighting: Weighting::Remainder, truncation_aware: true }
    }
}

/// The first omitted terms, used to estimate truncation bias.
pub fn next_order_terms(regime: Regime, spec: &Spectrum) -> Vec<Term> {
    let mu = regime.remainder_exponent(spec);
    let t = |name: &str, log_power: u32| Term { name: name.into(), exponent: mu, log_power };
    match regime {
        Regime::A { .. } => vec![t("r0", 0)],
        Regime::B { .. } | Regime::C => vec![t("r1", 1), t("r0", 0)],
    }
}

struct RawFit {
    coefficients: Vec<f64>,
    std_errors: Vec<f64>,
    residuals: Vec<f64>,
    condition: f64,
}

fn solve_terms(
    sol: &RadialSolution,
    terms: &[Term],
    i0: usize,
    i1: usize,
    mu: f64,
    weighting: Weighting,
) -> Result<RawFit> {
    let rows = i1 + 1 - i0;
    let s0 = sol.s_grid[i0];
    let column = |t: &Term, s: f64| s.powi(t.log_power as i32) * (t.exponent * (s - s0)).exp();
    let a = DMatrix::from_fn(rows, terms.len(), |r, c| column(&terms[c], sol.s_grid[i0 + r]));
    let target: Vec<f64> = (i0..=i1).map(|i| sol.y[i]).collect();
    let weights: Vec<f64> = (i0..=i1)
        .map(|i| match weighting {
            Weighting::Remainder => (-mu * (sol.s_grid[i] - s0)).exp(),
            Weighting::Relative => 1.0 / sol.y[i].abs(),
            Weighting::Uniform => 1.0,
        })
        .collect();
    let ls = solve_weighted(&a, &target, &weights)?;
    Ok(RawFit {
        coefficients: ls.coefficients,
        std_errors: ls.std_errors,
        residuals: ls.residuals,
        condition: ls.condition,
    })
}

pub fn fit_expansion(
    sol: &RadialSolution,
    spec: &Spectrum,
    regime: Regime,
    window: Option<(f64, f64)>,
) -> Result<ExpansionFit> {
    fit_expansion_with(sol, spec, regime, window, &FitOptions::default())
}

pub fn fit_expansion_with(
    sol: &RadialSolution,
    spec: &Spectrum,
    regime: Regime,
    window: Option<(f64, f64)>,
    opts: &FitOptions,
) -> Result<ExpansionFit> {
    let (s_lo, s_hi) = match window {
        Some(w) => w,
        None => default_window(sol, spec, regime)?,
    };
    let terms = basis(regime, spec);
    let i0 = sol.index_of(s_lo);
    let i1 = sol.index_of(s_hi);
    let rows = (i1 + 1).saturating_sub(i0);
    if rows < 4 * (terms.len() + 2) || rows < 2 * SLOPE_BLOCK {
        return Err(Error::WindowTooShort(format!(
            "[{s_lo}, {s_hi}] holds {rows} nodes for {} terms",
            terms.len()
        )));
    }
    let s0 = sol.s_grid[i0];
    let mu = regime.remainder_exponent(spec);
    let main = solve_terms(sol, &terms, i0, i1, mu, opts.weighting)?;
    let mut std_errors = main.std_errors.clone();
    if opts.truncation_aware {
        let mut extended = terms.clone();
        extended.extend(next_order_terms(regime, spec));
        // a failed extended fit leaves the classical errors in place
        if let Ok(ext) = solve_terms(sol, &extended, i0, i1, mu, opts.weighting) {
            for (j, se) in std_errors.iter_mut().enumerate() {
                let bias = ext.coefficients[j] - main.coefficients[j];
                *se = se.hypot(bias);
            }
        }
    }

    let coefficients = terms
        .iter()
        .enumerate()
        .map(|(j, t)| {
            // back to the unshifted convention c·s^q·e^{βs}
            let f = (-t.exponent * s0).exp();
            let c = main.coefficients[j];
            let value = if t.name == "a0" { c + sol.amplitude } else { c * f };
            let std_error = std_errors[j] * f;
            Coefficient {
                name: t.name.clone(),
                exponent: t.exponent,
                log_power: t.log_power,
                value,
                std_error,
                resolved: value.abs() > std_error,
            }
        })
        .collect();

    let half: Vec<(f64, f64)> =
        (rows / 2..rows).map(|r| (sol.s_grid[i0 + r], main.residuals[r])).collect();
    let residual_slope = block_max_slope(&half, SLOPE_BLOCK);

    Ok(ExpansionFit {
        regime,
        k: regime.k(),
        window: (s0, sol.s_grid[i1]),
        coefficients,
        residual_slope,
        remainder_exponent: mu,
        slack: SLOPE_SLACK * spec.l3().abs(),
        condition: main.condition,
        amplitude: sol.amplitude,
        options: *opts,
    })
}

/// Slope of `ln max|r|` per block of `block` points against the block centre.
pub fn block_max_slope(points: &[(f64, f64)], block: usize) -> f64 {
    let pts: Vec<(f64, f64)> = points
        .chunks(block)
        .filter(|c| c.len() == block)
        .filter_map(|c| {
            let m = c.iter().fold(0.0f64, |a, p| a.max(p.1.abs()));
            let centre = 0.5 * (c[0].0 + c[c.len() - 1].0);
            (m > 0.0).then(|| (centre, m.ln()))
        })
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 / n, a.1 + p.1 / n));
    let (sxy, sxx) =
        pts.iter().fold((0.0, 0.0), |a, p| (a.0 + (p.0 - mx) * (p.1 - my), a.1 + (p.0 - mx).powi(2)));
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftStability {
    pub name: String,
    pub change: f64,
    pub std_error: f64,
    /// `change < 3·std_error`.
    pub stable: bool,
}

/// Refits on the window shifted right by `fraction` of its width and compares
/// every coefficient with the original fit.
pub fn window_shift_stability(
    sol: &RadialSolution,
    spec: &Spectrum,
    fit: &ExpansionFit,
    fraction: f64,
) -> Result<Vec<ShiftStability>> {
    let (lo, hi) = fit.window;
    let d = fraction * (hi - lo);
    let shifted = fit_expansion_with(sol, spec, fit.regime, Some((lo + d, hi + d)), &fit.options)?;
    Ok(fit
        .coefficients
        .iter()
        .zip(&shifted.coefficients)
        .map(|(a, b)| {
            let change = (a.value - b.value).abs();
            ShiftStability {
                name: a.name.clone(),
                change,
                std_error: a.std_error,
                stable: change < 3.0 * a.std_error,
            }
        })
        .collect())
}
