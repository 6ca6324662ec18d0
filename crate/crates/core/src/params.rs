use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimension and exponent of the equation `Δ²φ = φ^p` in `R^n`.
///
/// Only `n` and `p` are stored; the Emden–Fowler exponent `m = 4/(p-1)` is
/// always derived on demand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub n: u32,
    pub p: f64,
}

impl ProblemParams {
    /// Validates `n >= 5` and `p` strictly above the Sobolev exponent.
    pub fn new(n: u32, p: f64) -> Result<Self> {
        if n < 5 {
            return Err(Error::InvalidParams(format!("dimension n = {n} must be at least 5")));
        }
        if !p.is_finite() {
            return Err(Error::InvalidParams(format!("exponent p = {p} is not finite")));
        }
        let sob = sobolev_exponent(n);
        if p <= sob {
            return Err(Error::InvalidParams(format!(
                "p = {p} must exceed the Sobolev exponent (n+4)/(n-4) = {sob}"
            )));
        }
        Ok(Self { n, p })
    }

    pub fn m(&self) -> f64 {
        4.0 / (self.p - 1.0)
    }

    pub fn nf(&self) -> f64 {
        f64::from(self.n)
    }

    /// `λ* = m − (n−4)/2`, the centre of symmetry of the eigenvalue polynomial.
    pub fn lambda_star(&self) -> f64 {
        self.m() - (self.nf() - 4.0) / 2.0
    }

    pub fn sobolev(&self) -> f64 {
        sobolev_exponent(self.n)
    }
}

/// `(n+4)/(n-4)`.
pub fn sobolev_exponent(n: u32) -> f64 {
    let n = f64::from(n);
    (n + 4.0) / (n - 4.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_sobolev_and_below() {
        assert!(ProblemParams::new(13, 17.0 / 9.0).is_err());
        assert!(ProblemParams::new(13, 1.5).is_err());
        assert!(ProblemParams::new(4, 10.0).is_err());
        assert!(ProblemParams::new(13, f64::NAN).is_err());
        assert!(ProblemParams::new(13, 2.0).is_ok());
    }

    #[test]
    fn lambda_star_vanishes_at_sobolev_exponent() {
        // m = (n-4)/2 exactly at p = (n+4)/(n-4)
        let n = 13;
        let p = sobolev_exponent(n);
        let m = 4.0 / (p - 1.0);
        assert!((m - (f64::from(n) - 4.0) / 2.0).abs() < 1e-14);
    }
}
