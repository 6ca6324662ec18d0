//! Finite-difference weights on uniform grids.

/// Fornberg's recursion: weights `w[k][j]` such that
/// `f⁽ᵏ⁾(x0) ≈ Σⱼ w[k][j]·f(xs[j])` for `k = 0..=max_order`.
pub fn fornberg_weights(x0: f64, xs: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Central weights on `2·half + 1` equispaced points with spacing `h`,
/// for derivative orders `0..=max_order`.
pub fn central_weights(half: usize, h: f64, max_order: usize) -> Vec<Vec<f64>> {
    let xs: Vec<f64> = (0..=2 * half).map(|j| (j as f64 - half as f64) * h).collect();
    fornberg_weights(0.0, &xs, max_order)
}

/// Applies a central stencil at every interior node; the `half` nodes at each
/// end are returned as `NaN`.
pub fn apply_central(values: &[f64], weights: &[f64]) -> Vec<f64> {
    let half = weights.len() / 2;
    let mut out = vec![f64::NAN; values.len()];
    if values.len() < weights.len() {
        return out;
    }
    for i in half..values.len() - half {
        out[i] = weights.iter().zip(&values[i - half..=i + half]).map(|(w, v)| w * v).sum();
    }
    out
}
