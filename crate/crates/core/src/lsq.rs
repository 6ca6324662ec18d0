//! Weighted linear least squares through the SVD of a column-scaled design.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Condition numbers above this are rejected.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub coefficients: Vec<f64>,
    /// Classical standard errors `sqrt(σ²·diag((AᵀWA)⁻¹))`.
    pub std_errors: Vec<f64>,
    /// Unweighted residuals `b − A·x`.
    pub residuals: Vec<f64>,
    /// Condition number of the column-scaled, weighted design.
    pub condition: f64,
}

/// Minimises `Σ (wᵢ·(bᵢ − (A x)ᵢ))²`. Weighted columns are scaled to unit
/// maximum before the decomposition and the scaling is undone afterwards.
pub fn solve_weighted(a: &DMatrix<f64>, b: &[f64], row_weights: &[f64]) -> Result<LeastSquares> {
    let (rows, cols) = a.shape();
    if rows <= cols || b.len() != rows || row_weights.len() != rows {
        return Err(Error::WindowTooShort(format!("{rows} rows for {cols} unknowns")));
    }
    let scales: Vec<f64> = (0..cols)
        .map(|j| {
            let m = (0..rows).fold(0.0f64, |acc, i| acc.max((a[(i, j)] * row_weights[i]).abs()));
            if m > 0.0 {
                m
            } else {
                1.0
            }
        })
        .collect();
    let aw = DMatrix::from_fn(rows, cols, |i, j| a[(i, j)] * row_weights[i] / scales[j]);
    let bw = DVector::from_fn(rows, |i, _| b[i] * row_weights[i]);

    let svd = aw.clone().svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.max();
    let smin = sv.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned(condition));
    }
    let x = svd.solve(&bw, 0.0).map_err(|_| Error::IllConditioned(condition))?;

    let rw = &bw - &aw * &x;
    let dof = (rows - cols) as f64;
    let sigma2 = rw.norm_squared() / dof;
    let v_t = svd.v_t.as_ref().expect("requested V");
    let std_errors: Vec<f64> = (0..cols)
        .map(|j| {
            let var: f64 = (0..cols).map(|k| (v_t[(k, j)] / sv[k]).powi(2)).sum();
            (sigma2 * var).sqrt() / scales[j]
        })
        .collect();
    let coefficients: Vec<f64> = (0..cols).map(|j| x[j] / scales[j]).collect();
    let residuals = (0..rows)
        .map(|i| b[i] - (0..cols).map(|j| a[(i, j)] * coefficients[j]).sum::<f64>())
        .collect();
    Ok(LeastSquares { coefficients, std_errors, residuals, condition })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_coefficients() {
        let xs: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let a = DMatrix::from_fn(50, 3, |i, j| match j {
            0 => 1.0,
            1 => (-xs[i]).exp(),
            _ => 1e-6 * (-3.0 * xs[i]).exp(),
        });
        let b: Vec<f64> = (0..50).map(|i| 2.0 - 0.5 * a[(i, 1)] + 7.0 * a[(i, 2)]).collect();
        let ls = solve_weighted(&a, &b, &vec![1.0; 50]).unwrap();
        assert!((ls.coefficients[0] - 2.0).abs() < 1e-12);
        assert!((ls.coefficients[1] + 0.5).abs() < 1e-11);
        assert!((ls.coefficients[2] - 7.0).abs() < 1e-8);
        assert!(ls.residuals.iter().all(|r| r.abs() < 1e-12));
    }

    #[test]
    fn standard_errors_match_straight_line_formula() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let noise: Vec<f64> = (0..20).map(|i| if i % 2 == 0 { 0.1 } else { -0.1 }).collect();
        let a = DMatrix::from_fn(20, 2, |i, j| if j == 0 { 1.0 } else { xs[i] });
        let b: Vec<f64> = (0..20).map(|i| 1.0 + 2.0 * xs[i] + noise[i]).collect();
        let ls = solve_weighted(&a, &b, &vec![1.0; 20]).unwrap();
        let mean = xs.iter().sum::<f64>() / 20.0;
        let sxx: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
        let rss: f64 = ls.residuals.iter().map(|r| r * r).sum();
        let se_slope = (rss / 18.0 / sxx).sqrt();
        assert!((ls.std_errors[1] - se_slope).abs() < 1e-12 * se_slope.max(1.0));
    }

    #[test]
    fn collinear_columns_are_rejected() {
        let a = DMatrix::from_fn(10, 2, |i, _| i as f64);
        let b = vec![1.0; 10];
        assert!(matches!(solve_weighted(&a, &b, &vec![1.0; 10]), Err(Error::IllConditioned(_))));
    }
}
