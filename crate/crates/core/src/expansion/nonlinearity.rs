use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `g(y) = (y+L)^p − L^p − p·L^{p−1}·y`, the nonlinear remainder of the
/// Emden–Fowler equation around the singular solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Nonlinearity {
    pub amplitude: f64,
    pub p: f64,
    /// `d₂, d₃, …` up to the requested order.
    pub taylor: Vec<f64>,
}

/// Generalised binomial coefficient `p(p−1)…(p−j+1)/j!`.
pub fn binomial(p: f64, j: usize) -> f64 {
    (0..j).fold(1.0, |c, i| c * (p - i as f64) / (i + 1) as f64)
}

/// `dⱼ = C(p, j)·L^{p−j}` for `j = 2..=order`.
pub fn taylor_coeffs(p: f64, amplitude: f64, order: usize) -> Vec<f64> {
    (2..=order.max(2)).map(|j| binomial(p, j) * amplitude.powf(p - j as f64)).collect()
}

impl Nonlinearity {
    pub fn new(p: f64, amplitude: f64, order: usize) -> Self {
        Self { amplitude, p, taylor: taylor_coeffs(p, amplitude, order) }
    }

    pub fn eval(&self, y: f64) -> Result<f64> {
        g_eval(self.p, self.amplitude, y)
    }

    /// `Σ_{j=2}^{order} dⱼ yʲ` with the stored coefficients.
    pub fn truncated(&self, y: f64) -> f64 {
        self.taylor.iter().enumerate().map(|(i, d)| d * y.powi(i as i32 + 2)).sum()
    }
}

/// Evaluates `g` to full relative precision, including for tiny `y` where the
/// defining expression cancels catastrophically.
pub fn g_eval(p: f64, amplitude: f64, y: f64) -> Result<f64> {
    if !(y > -amplitude) {
        return Err(Error::DomainError(format!("g needs y > -L = {}, got {y}", -amplitude)));
    }
    let x = y / amplitude;
    let lp = amplitude.powf(p);
    if x.abs() < 0.05 {
        let mut term = binomial(p, 2) * x * x;
        let mut sum = 0.0;
        let mut j = 2;
        while term != 0.0 && j < 200 {
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
            term *= (p - j as f64) / (j + 1) as f64 * x;
            j += 1;
        }
        Ok(lp * sum)
    } else {
        Ok(lp * ((p * x.ln_1p()).exp_m1() - p * x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vanishes_at_zero_with_zero_slope() {
        assert_eq!(g_eval(28.0, 1.13, 0.0).unwrap(), 0.0);
        let ratios: Vec<f64> =
            (2..=8).map(|j| g_eval(5.0, 1.3, 10f64.powi(-j)).unwrap() / 10f64.powi(-j)).collect();
        for w in ratios.windows(2) {
            let q = w[1] / w[0];
            assert!(q > 0.09 && q < 0.11, "{q}");
        }
    }

    #[test]
    fn series_and_direct_branches_agree_at_the_switch() {
        let (p, l) = (7.3, 2.1);
        let y = 0.05 * l;
        let below = g_eval(p, l, y * (1.0 - 1e-12)).unwrap();
        let above = g_eval(p, l, y * (1.0 + 1e-12)).unwrap();
        assert!((below - above).abs() / above < 1e-10);
    }

    #[test]
    fn quadratic_coefficient_by_richardson() {
        let (p, l) = (6.5, 1.7);
        let q = |h: f64| g_eval(p, l, h).unwrap() / (h * h);
        // q(h) = d₂ + d₃h + d₄h² + …: eliminate the linear, then the quadratic term
        let r1 = |h: f64| 2.0 * q(h / 2.0) - q(h);
        let h = 1e-3;
        let rich = (4.0 * r1(h / 2.0) - r1(h)) / 3.0;
        let d2 = taylor_coeffs(p, l, 2)[0];
        assert!((rich - d2).abs() / d2 < 1e-8);
        assert!((d2 - p * (p - 1.0) * l.powf(p - 2.0) / 2.0).abs() / d2 < 1e-14);
    }

    #[test]
    fn integer_exponent_terminates() {
        let d = taylor_coeffs(3.0, 1.9, 6);
        assert!((d[0] - 3.0 * 1.9).abs() < 1e-14);
        assert!((d[1] - 1.0).abs() < 1e-14);
        assert!(d[2..].iter().all(|x| *x == 0.0));
        let nl = Nonlinearity::new(3.0, 1.9, 3);
        for y in [-0.9, -0.1, 0.3, 1.5] {
            assert!((nl.eval(y).unwrap() - nl.truncated(y)).abs() < 1e-13);
        }
    }

    #[test]
    fn domain_is_enforced() {
        assert!(matches!(g_eval(3.0, 1.0, -1.0), Err(Error::DomainError(_))));
        assert!(matches!(g_eval(3.0, 1.0, -2.0), Err(Error::DomainError(_))));
    }
}
