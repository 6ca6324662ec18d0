//! Eigenvalues of the linearisation of the Emden–Fowler equation around the
//! singular solution.
//!
//! The linearised operator is `𝒫(∂ₛ)` with `𝒫(λ) = Q₄(m − λ) − p·Q₄(m)`. It is
//! symmetric about `λ*`, negative at `0` and `2λ*`, nonnegative at `λ*` when
//! `p ≥ p_c`, which gives one sign-change bracket per root.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ProblemParams;
use crate::quartic::{q4_derivative, q4_eval};
use crate::roots::bisect_newton;

/// `|λ₃ − λ₂| < DEGENERACY_TOL·|λ*|` declares a double root.
pub const DEGENERACY_TOL: f64 = 1e-6;

/// Relative tolerance on `𝒫(λ*)` below which `p` is treated as `p_c` itself.
pub const CRITICAL_POLY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub params: ProblemParams,
    pub lambda_star: f64,
    /// Ordered roots `λ₁ < λ₂ ≤ λ₃ < λ₄` of `𝒫`.
    pub lambdas: [f64; 4],
    /// Singular amplitude `L = Q₄(m)^{1/(p−1)}`.
    pub amplitude: f64,
    pub degenerate: bool,
    /// `max(|λ₁+λ₄−2λ*|, |λ₂+λ₃−2λ*|)` of the raw roots.
    pub symmetry_residual: f64,
    /// `max |𝒫(λᵢ)| / (1 + |p·Q₄(m)|)`.
    pub poly_residual: f64,
}

impl Spectrum {
    pub fn l1(&self) -> f64 {
        self.lambdas[0]
    }
    pub fn l2(&self) -> f64 {
        self.lambdas[1]
    }
    pub fn l3(&self) -> f64 {
        self.lambdas[2]
    }
    pub fn l4(&self) -> f64 {
        self.lambdas[3]
    }

    /// Checks `λ₁ < 2λ* < λ₂ ≤ λ* ≤ λ₃ < 0 < λ₄`.
    pub fn ordering_holds(&self) -> bool {
        let [l1, l2, l3, l4] = self.lambdas;
        let ls = self.lambda_star;
        l1 < 2.0 * ls && 2.0 * ls < l2 && l2 <= ls && ls <= l3 && l3 < 0.0 && 0.0 < l4
    }
}

/// `𝒫(λ) = Q₄(m − λ) − p·Q₄(m)`.
pub fn eigen_poly_eval(params: &ProblemParams, lambda: f64) -> f64 {
    let m = params.m();
    q4_eval(params.n, m - lambda) - params.p * q4_eval(params.n, m)
}

pub fn eigen_poly_derivative(params: &ProblemParams, lambda: f64) -> f64 {
    -q4_derivative(params.n, params.m() - lambda)
}

/// Scale used to make residuals of `𝒫` relative.
pub fn eigen_poly_scale(params: &ProblemParams) -> f64 {
    1.0 + (params.p * q4_eval(params.n, params.m())).abs()
}

/// `L = Q₄(m)^{1/(p−1)}`, the amplitude of the singular solution `L·r^{−m}`.
pub fn singular_amplitude(params: &ProblemParams) -> Result<f64> {
    let q = q4_eval(params.n, params.m());
    if !(q > 0.0) {
        return Err(Error::InvalidParams(format!(
            "Q4(m) = {q} is not positive for n = {}, p = {}",
            params.n, params.p
        )));
    }
    Ok((q.ln() / (params.p - 1.0)).exp())
}

pub fn compute_spectrum(params: &ProblemParams) -> Result<Spectrum> {
    let params = ProblemParams::new(params.n, params.p)?;
    let ls = params.lambda_star();
    let amplitude = singular_amplitude(&params)?;
    let scale = eigen_poly_scale(&params);
    let poly = |l: f64| eigen_poly_eval(&params, l);
    let dpoly = |l: f64| eigen_poly_derivative(&params, l);

    let at_centre = poly(ls);
    if at_centre < -CRITICAL_POLY_TOL * scale {
        return Err(Error::SubcriticalInput { n: params.n, p: params.p, value: at_centre });
    }

    // outer roots: expand the brackets until 𝒫 turns positive
    let mut step = ls.abs().max(1.0);
    while poly(2.0 * ls - step) <= 0.0 {
        step *= 2.0;
    }
    let l1 = bisect_newton(poly, dpoly, 2.0 * ls - step, 2.0 * ls)?;
    let mut step = ls.abs().max(1.0);
    while poly(step) <= 0.0 {
        step *= 2.0;
    }
    let l4 = bisect_newton(poly, dpoly, 0.0, step)?;

    let (mut l2, mut l3) = if at_centre <= 0.0 {
        (ls, ls)
    } else {
        (
            bisect_newton(poly, dpoly, 2.0 * ls, ls)?,
            bisect_newton(poly, dpoly, ls, 0.0)?,
        )
    };
    let symmetry_residual = (l1 + l4 - 2.0 * ls).abs().max((l2 + l3 - 2.0 * ls).abs());
    let degenerate = (l3 - l2).abs() < DEGENERACY_TOL * ls.abs();
    if degenerate {
        l2 = ls;
        l3 = ls;
    }
    let lambdas = [l1, l2, l3, l4];
    let poly_residual = lambdas.iter().map(|&l| poly(l).abs()).fold(0.0, f64::max) / scale;

    Ok(Spectrum {
        params,
        lambda_star: ls,
        lambdas,
        amplitude,
        degenerate,
        symmetry_residual,
        poly_residual,
    })
}
