//! Variation-of-parameters form of `(∂ₛ−λ₁)(∂ₛ−λ₂)(∂ₛ−λ₃)Z = g(Y)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::nonlinearity::g_eval;
use crate::error::{Error, Result};
use crate::lsq::solve_weighted;
use crate::shooting::RadialSolution;
use crate::spectrum::Spectrum;
use crate::stencil::central_weights;

const GAUSS_X: [f64; 4] = [0.1834346424956498, 0.525532409916329, 0.7966664774136267, 0.9602898564975363];
const GAUSS_W: [f64; 4] = [0.362683783378362, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationKernel {
    pub s0: f64,
    /// `λ₁, λ₂, λ₃`.
    pub lambdas: [f64; 3],
    /// Homogeneous coefficients; `None` until fitted against a solution.
    pub alphas: Option<[f64; 3]>,
    pub betas: [f64; 3],
    /// Double root `λ₂ = λ₃`: the third kernel is `(s−τ)e^{λ₃(s−τ)}` and the
    /// homogeneous terms are `e^{λ₁s}, e^{λ₃s}, s·e^{λ₃s}`.
    pub degenerate: bool,
}

/// Partial-fraction weights of `1/((x−λ₁)(x−λ₂)(x−λ₃))`.
pub fn partial_fraction_betas(l: [f64; 3]) -> [f64; 3] {
    [
        1.0 / ((l[0] - l[1]) * (l[0] - l[2])),
        1.0 / ((l[1] - l[0]) * (l[1] - l[2])),
        1.0 / ((l[2] - l[0]) * (l[2] - l[1])),
    ]
}

/// Weights of `1/((x−λ₁)(x−λ₃)²)` on `1/(x−λ₁)`, `1/(x−λ₃)`, `1/(x−λ₃)²`.
pub fn degenerate_betas(l1: f64, l3: f64) -> [f64; 3] {
    let b1 = 1.0 / ((l1 - l3) * (l1 - l3));
    [b1, -b1, 1.0 / (l3 - l1)]
}

pub fn variation_kernel(spec: &Spectrum, s0: f64) -> VariationKernel {
    let [l1, l2, l3, _] = spec.lambdas;
    if spec.degenerate {
        VariationKernel {
            s0,
            lambdas: [l1, l3, l3],
            alphas: None,
            betas: degenerate_betas(l1, l3),
            degenerate: true,
        }
    } else {
        let lambdas = [l1, l2, l3];
        VariationKernel { s0, lambdas, alphas: None, betas: partial_fraction_betas(lambdas), degenerate: false }
    }
}

impl VariationKernel {
    /// The Green's function `K(u)` of the factored operator, `u = s − τ ≥ 0`.
    pub fn green(&self, u: f64) -> f64 {
        let [l1, l2, l3] = self.lambdas;
        let [b1, b2, b3] = self.betas;
        if self.degenerate {
            b1 * (l1 * u).exp() + b2 * (l3 * u).exp() + b3 * u * (l3 * u).exp()
        } else {
            b1 * (l1 * u).exp() + b2 * (l2 * u).exp() + b3 * (l3 * u).exp()
        }
    }

    /// Homogeneous solutions at `s` in the order matching `alphas`.
    pub fn homogeneous(&self, s: f64) -> [f64; 3] {
        let [l1, l2, l3] = self.lambdas;
        if self.degenerate {
            [(l1 * s).exp(), (l3 * s).exp(), s * (l3 * s).exp()]
        } else {
            [(l1 * s).exp(), (l2 * s).exp(), (l3 * s).exp()]
        }
    }

    /// `Σβᵢ ∫_{s₀}^{s} kᵢ(s−τ) h(τ) dτ` at every node of a uniform grid whose
    /// first node is `s₀`.
    pub fn convolve(&self, forcing: &[f64], ds: f64) -> Vec<f64> {
        let [l1, l2, l3] = self.lambdas;
        let [b1, b2, b3] = self.betas;
        let i1 = exp_convolution(forcing, ds, l1, false);
        if self.degenerate {
            let i3 = exp_convolution(forcing, ds, l3, false);
            let j3 = exp_convolution(forcing, ds, l3, true);
            (0..forcing.len()).map(|i| b1 * i1[i] + b2 * i3[i] + b3 * j3[i]).collect()
        } else {
            let i2 = exp_convolution(forcing, ds, l2, false);
            let i3 = exp_convolution(forcing, ds, l3, false);
            (0..forcing.len()).map(|i| b1 * i1[i] + b2 * i2[i] + b3 * i3[i]).collect()
        }
    }
}

/// `∫_{s₀}^{sⱼ} k(sⱼ−τ) f(τ) dτ` with `k(u) = e^{λu}` or `u·e^{λu}` (when
/// `weighted`) on a uniform grid starting at `s₀`. Each step integrates the
/// kernel exactly against a local cubic interpolant of `f`, so the result is
/// fourth-order accurate.
pub fn exp_convolution(f: &[f64], ds: f64, lambda: f64, weighted: bool) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n < 4 {
        // trapezoid fallback for degenerate tiny grids
        let e = (lambda * ds).exp();
        let mut i_acc = 0.0;
        let mut j_acc = 0.0;
        for j in 0..n - 1 {
            let loc_i = 0.5 * ds * (e * f[j] + f[j + 1]);
            let loc_j = 0.5 * ds * ds * e * f[j];
            j_acc = e * (j_acc + ds * i_acc) + loc_j;
            i_acc = e * i_acc + loc_i;
            out[j + 1] = if weighted { j_acc } else { i_acc };
        }
        return out;
    }
    let e = (lambda * ds).exp();
    let plain = |u: f64| (lambda * u).exp();
    let wgt = |u: f64| u * (lambda * u).exp();
    let sets = [[0.0, 1.0, 2.0, 3.0], [-1.0, 0.0, 1.0, 2.0], [-2.0, -1.0, 0.0, 1.0]];
    let wi: Vec<[f64; 4]> = sets.iter().map(|o| local_weights(&plain, ds, o)).collect();
    let wj: Vec<[f64; 4]> = sets.iter().map(|o| local_weights(&wgt, ds, o)).collect();
    let (mut i_acc, mut j_acc) = (0.0, 0.0);
    for j in 0..n - 1 {
        let (set, first) = if j == 0 {
            (0, 0)
        } else if j + 2 < n {
            (1, j - 1)
        } else {
            (2, j - 2)
        };
        let fv = &f[first..first + 4];
        let loc_i: f64 = wi[set].iter().zip(fv).map(|(w, v)| w * v).sum();
        let loc_j: f64 = wj[set].iter().zip(fv).map(|(w, v)| w * v).sum();
        j_acc = e * (j_acc + ds * i_acc) + loc_j;
        i_acc = e * i_acc + loc_i;
        out[j + 1] = if weighted { j_acc } else { i_acc };
    }
    out
}

/// `∫₀ʰ k(h−t) ℓₘ(t) dt` for the cubic Lagrange basis on nodes `offsets·h`.
fn local_weights(k: &dyn Fn(f64) -> f64, h: f64, offsets: &[f64; 4]) -> [f64; 4] {
    let mut w = [0.0; 4];
    for (gx, gw) in GAUSS_X.iter().zip(GAUSS_W) {
        for sign in [-1.0, 1.0] {
            let t = 0.5 * h * (1.0 + sign * gx);
            let kv = k(h - t) * 0.5 * h * gw;
            let x = t / h;
            for m in 0..4 {
                let mut l = 1.0;
                for q in 0..4 {
                    if q != m {
                        l *= (x - offsets[q]) / (offsets[m] - offsets[q]);
                    }
                }
                w[m] += kv * l;
            }
        }
    }
    w
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Representation {
    pub kernel: VariationKernel,
    /// Grid range `[s₀, s_end]` on which `Z` was reconstructed.
    pub s_range: (f64, f64),
    pub reconstruction: Vec<f64>,
    /// `max |Z − Ẑ| / max |Z|` over the range.
    pub deviation: f64,
    pub condition: f64,
}

/// Fits the homogeneous coefficients of the representation of `Z` on
/// `[s₀, s_end]` with the given forcing samples (normally `g(Y)`), and reports
/// how well the representation reproduces the grid `Z`.
pub fn fit_representation(
    sol: &RadialSolution,
    kern: &VariationKernel,
    forcing: &[f64],
    s_end: f64,
) -> Result<Representation> {
    let i0 = sol.index_of(kern.s0).max(2);
    let i1 = sol.index_of(s_end).min(sol.len() - 3);
    if i1 < i0 + 8 {
        return Err(Error::WindowTooShort(format!("[{}, {s_end}]", kern.s0)));
    }
    if forcing.len() != i1 - i0 + 1 {
        return Err(Error::InvalidParams(format!(
            "forcing has {} samples, window has {}",
            forcing.len(),
            i1 - i0 + 1
        )));
    }
    let s0 = sol.s_grid[i0];
    let kern = VariationKernel { s0, ..kern.clone() };
    let conv = kern.convolve(forcing, sol.ds);
    let rows = i1 - i0 + 1;
    // homogeneous terms in the shifted variable σ = s − s₀ for conditioning
    let shifted = VariationKernel { s0: 0.0, ..kern.clone() };
    let a = DMatrix::from_fn(rows, 3, |r, c| shifted.homogeneous(sol.s_grid[i0 + r] - s0)[c]);
    let target: Vec<f64> = (0..rows).map(|r| sol.z[i0 + r] - conv[r]).collect();
    let ls = solve_weighted(&a, &target, &vec![1.0; rows])?;
    let c = &ls.coefficients;
    let [l1, l2, l3] = kern.lambdas;
    let alphas = if kern.degenerate {
        let a3 = c[2] * (-l3 * s0).exp();
        [c[0] * (-l1 * s0).exp(), (c[1] - c[2] * s0) * (-l3 * s0).exp(), a3]
    } else {
        [c[0] * (-l1 * s0).exp(), c[1] * (-l2 * s0).exp(), c[2] * (-l3 * s0).exp()]
    };
    let reconstruction: Vec<f64> =
        (0..rows).map(|r| target[r] - ls.residuals[r] + conv[r]).collect();
    let zmax = (i0..=i1).fold(0.0f64, |m, i| m.max(sol.z[i].abs()));
    let dev = (0..rows).fold(0.0f64, |m, r| m.max((reconstruction[r] - sol.z[i0 + r]).abs()));
    Ok(Representation {
        kernel: VariationKernel { alphas: Some(alphas), ..kern },
        s_range: (s0, sol.s_grid[i1]),
        reconstruction,
        deviation: dev / zmax,
        condition: ls.condition,
    })
}

/// Last node where `Z` is still well above its rounding floor.
pub fn resolved_end(sol: &RadialSolution, from: usize) -> usize {
    let last = sol.len() - 3;
    let z0 = sol.z[from.clamp(2, last)].abs();
    (from..=last).rev().find(|&i| sol.z[i].abs() > 1e-10 * z0).unwrap_or(last)
}

/// `g(Y)` on nodes `i0..=i1`.
pub fn forcing_on(sol: &RadialSolution, i0: usize, i1: usize) -> Result<Vec<f64>> {
    (i0..=i1).map(|i| g_eval(sol.params.p, sol.amplitude, sol.y[i])).collect()
}

/// Normalised deviation between the grid `Z` and its variation-of-parameters
/// reconstruction from `g(Y)` starting at `kern.s0`.
pub fn representation_check(sol: &RadialSolution, spec: &Spectrum, kern: &VariationKernel) -> Result<f64> {
    let expected = variation_kernel(spec, kern.s0);
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(1.0);
    if expected.degenerate != kern.degenerate
        || !kern.lambdas.iter().zip(&expected.lambdas).all(|(a, b)| close(*a, *b))
    {
        return Err(Error::InvalidParams("kernel does not belong to this spectrum".into()));
    }
    let i0 = sol.index_of(kern.s0).max(2);
    let i1 = resolved_end(sol, i0);
    let forcing = forcing_on(sol, i0, i1)?;
    Ok(fit_representation(sol, kern, &forcing, sol.s_grid[i1])?.deviation)
}

/// `(∂ₛ−λ₁)(∂ₛ−λ₂)(∂ₛ−λ₃)` applied with 9-point central stencils; entry `j`
/// of the result belongs to node `j + 4` of `values`.
pub fn apply_factored_operator(values: &[f64], ds: f64, l: [f64; 3]) -> Vec<f64> {
    // D³ − e₁D² + e₂D − e₃
    let e1 = l[0] + l[1] + l[2];
    let e2 = l[0] * l[1] + l[0] * l[2] + l[1] * l[2];
    let e3 = l[0] * l[1] * l[2];
    let w = central_weights(4, ds, 3);
    (4..values.len().saturating_sub(4))
        .map(|i| {
            let win = &values[i - 4..=i + 4];
            let d = |k: usize| w[k].iter().zip(win).map(|(a, b)| a * b).sum::<f64>();
            d(3) - e1 * d(2) + e2 * d(1) - e3 * values[i]
        })
        .collect()
}

/// Closed-form oracle for the kernel of `spec`: convolves `h = e^{μs}` with
/// `μ = λ₃/2` on `[0, 3]` and returns `max |(∂ₛ−λ₁)(∂ₛ−λ₂)(∂ₛ−λ₃)Ẑ − h| / max h`.
pub fn kernel_oracle_residual(spec: &Spectrum) -> f64 {
    let kern = variation_kernel(spec, 0.0);
    let mu = 0.5 * spec.l3();
    let ds = 2.5e-3;
    let h: Vec<f64> = (0..=1200).map(|i| (mu * i as f64 * ds).exp()).collect();
    let conv = kern.convolve(&h, ds);
    let res = apply_factored_operator(&conv, ds, kern.lambdas);
    let hmax = h.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    res.iter().zip(&h[4..]).map(|(r, h)| (r - h).abs()).fold(0.0, f64::max) / hmax
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kernel(l: [f64; 3], degenerate: bool) -> VariationKernel {
        let betas = if degenerate { degenerate_betas(l[0], l[2]) } else { partial_fraction_betas(l) };
        VariationKernel { s0: 0.0, lambdas: l, alphas: None, betas, degenerate }
    }

    #[test]
    fn convolution_solves_factored_equation_for_exponential_forcing() {
        let l = [-12.26, -4.49, -4.22];
        let mu = -1.0;
        let ds = 2.5e-3;
        let s: Vec<f64> = (0..=1200).map(|i| i as f64 * ds).collect();
        let h: Vec<f64> = s.iter().map(|x| (mu * x).exp()).collect();
        let conv = kernel(l, false).convolve(&h, ds);
        let res = apply_factored_operator(&conv, ds, l);
        let worst = res.iter().zip(&h[4..]).map(|(r, h)| (r - h).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-8, "{worst}");
        // the convolution differs from the closed-form particular solution by
        // homogeneous terms only: Σβᵢ(e^{μs} − e^{λᵢs})/(μ − λᵢ)
        let b = partial_fraction_betas(l);
        for (i, x) in s.iter().enumerate() {
            let exact: f64 = (0..3).map(|k| b[k] * ((mu * x).exp() - (l[k] * x).exp()) / (mu - l[k])).sum();
            assert!((conv[i] - exact).abs() < 1e-12, "{i}");
        }
    }

    #[test]
    fn degenerate_convolution_solves_factored_equation() {
        let l = [-12.26, -4.35, -4.35];
        let mu = -0.7;
        let ds = 2.5e-3;
        let h: Vec<f64> = (0..=1200).map(|i| (mu * i as f64 * ds).exp()).collect();
        let conv = kernel(l, true).convolve(&h, ds);
        let res = apply_factored_operator(&conv, ds, l);
        let worst = res.iter().zip(&h[4..]).map(|(r, h)| (r - h).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-8, "{worst}");
    }

    #[test]
    fn two_eigenvalue_step_solves_second_order_equation() {
        let (l1, l2) = (-9.0, -2.5);
        let ds = 1e-3;
        let s: Vec<f64> = (0..=2000).map(|i| i as f64 * ds).collect();
        let h: Vec<f64> = s.iter().map(|x| (1.3 * x).sin() + 0.2).collect();
        let a = exp_convolution(&h, ds, l1, false);
        let b = exp_convolution(&h, ds, l2, false);
        let v: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x - y) / (l1 - l2)).collect();
        let w = central_weights(3, ds, 2);
        for i in 3..v.len() - 3 {
            let win = &v[i - 3..=i + 3];
            let d = |k: usize| w[k].iter().zip(win).map(|(a, b)| a * b).sum::<f64>();
            let lhs = d(2) - (l1 + l2) * d(1) + l1 * l2 * v[i];
            assert!((lhs - h[i]).abs() < 1e-7, "{i}: {lhs} vs {}", h[i]);
        }
    }

    #[test]
    fn nondegenerate_kernel_tends_to_degenerate_form() {
        let (l1, l3) = (-12.0, -4.0);
        let limit = kernel([l1, l3, l3], true);
        let mut prev = f64::INFINITY;
        for eps in [1e-2, 1e-3, 1e-4] {
            let k = kernel([l1, l3 - eps, l3], false);
            let err = (0..50)
                .map(|i| i as f64 * 0.1)
                .map(|u| (k.green(u) - limit.green(u)).abs())
                .fold(0.0, f64::max);
            assert!(err < prev);
            prev = err;
        }
        assert!(prev < 1e-4);
    }

    #[test]
    fn betas_depend_only_on_eigenvalues_and_sum_to_zero() {
        let b = partial_fraction_betas([-12.0, -5.0, -3.0]);
        // partial fractions of a degree −3 rational function: Σβ = Σβλ = 0
        assert!((b[0] + b[1] + b[2]).abs() < 1e-15);
        assert!((-12.0 * b[0] - 5.0 * b[1] - 3.0 * b[2]).abs() < 1e-14);
        // green's function: K(0) = K'(0) = 0, K''(0) = 1
        let k = kernel([-12.0, -5.0, -3.0], false);
        let h = 1e-3;
        assert!(k.green(0.0).abs() < 1e-15);
        let k2 = (k.green(2.0 * h) - 2.0 * k.green(h) + k.green(0.0)) / (h * h);
        assert!((k2 - 1.0).abs() < 0.05);
    }
}
