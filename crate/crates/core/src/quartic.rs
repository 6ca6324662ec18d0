//! The quartic symbol `Q₄(α) = |x|^{α+4} Δ² |x|^{-α}`.

/// Offsets `a` of the four linear factors `(α + a)` of `Q₄`.
fn factor_offsets(n: u32) -> [f64; 4] {
    let n = f64::from(n);
    [0.0, 2.0, 2.0 - n, 4.0 - n]
}

/// `Q₄(α) = α(α+2)(α+2−n)(α+4−n)`, evaluated in factored form.
pub fn q4_eval(n: u32, alpha: f64) -> f64 {
    factor_offsets(n).iter().map(|a| alpha + a).product()
}

/// Derivative `Q₄'(α)` by the product rule on the factored form.
pub fn q4_derivative(n: u32, alpha: f64) -> f64 {
    let f = factor_offsets(n).map(|a| alpha + a);
    (0..4)
        .map(|skip| (0..4).filter(|&i| i != skip).map(|i| f[i]).product::<f64>())
        .sum()
}

/// Coefficients `c₀..c₄` of the constant-coefficient operator
/// `Q₄(m − ∂) = Σ c_k ∂^k`. `c₄ = 1` and `c₀ = Q₄(m)`.
pub fn shifted_operator_coeffs(n: u32, m: f64) -> [f64; 5] {
    // multiply out Π (b_i − D), b_i = m + a_i
    let mut poly = [1.0, 0.0, 0.0, 0.0, 0.0];
    let mut deg = 0;
    for a in factor_offsets(n) {
        let b = m + a;
        let mut next = [0.0; 5];
        for k in 0..=deg {
            next[k] += b * poly[k];
            next[k + 1] -= poly[k];
        }
        poly = next;
        deg += 1;
    }
    poly
}
