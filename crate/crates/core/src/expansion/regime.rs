use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ladder::CriticalLadder;
use crate::params::ProblemParams;
use crate::spectrum::Spectrum;

/// Default half-width of the band around a rung treated as the rung itself.
pub const RUNG_TOL: f64 = 1e-4;

/// Which asymptotic expansion applies to the entire solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "lowercase")]
pub enum Regime {
    /// `p_k < p < p_{k+1}` (with `p_{N+1} = ∞`).
    A { k: usize },
    /// `p = p_k`, `k ≥ 2`: `kλ₃ = λ₂` and a logarithmic term appears.
    B { k: usize },
    /// `p = p_c`: `λ₂ = λ₃`.
    C,
}

impl Regime {
    pub fn k(&self) -> usize {
        match *self {
            Regime::A { k } | Regime::B { k } => k,
            Regime::C => 1,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Regime::A { .. } => "a",
            Regime::B { .. } => "b",
            Regime::C => "c",
        }
    }

    /// Exponent of the remainder after the expansion's explicit terms.
    pub fn remainder_exponent(&self, spec: &Spectrum) -> f64 {
        match self {
            Regime::C => 2.0 * spec.l3(),
            _ => spec.l2() + spec.l3(),
        }
    }
}

pub fn detect_regime(params: &ProblemParams, ladder: &CriticalLadder, rung_tol: f64) -> Result<Regime> {
    let p = params.p;
    if p < ladder.p_c - rung_tol {
        return Err(Error::SubcriticalInput { n: params.n, p, value: p - ladder.p_c });
    }
    if (p - ladder.p_c).abs() < rung_tol {
        return Ok(Regime::C);
    }
    for (i, &pk) in ladder.rungs.iter().enumerate().skip(1) {
        if (p - pk).abs() < rung_tol {
            return Ok(Regime::B { k: i + 1 });
        }
    }
    let k = ladder.rungs.iter().filter(|&&pk| pk < p).count();
    Ok(Regime::A { k })
}

/// The chain `λ₁ < λ₂+λ₃ < (k+1)λ₃ < λ₂ < kλ₃ < 0` that orders the terms of
/// the regime-(a) expansion.
pub fn ordering_chain(spec: &Spectrum, k: usize) -> [bool; 5] {
    let [l1, l2, l3, _] = spec.lambdas;
    let k = k as f64;
    [l1 < l2 + l3, l2 + l3 < (k + 1.0) * l3, (k + 1.0) * l3 < l2, l2 < k * l3, k * l3 < 0.0]
}
