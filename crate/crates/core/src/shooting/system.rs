//! The two charts used by the shooter: the radial system in `r` and the
//! Emden–Fowler system in `s = ln r`, written for `Y = W − L`.

use crate::ode::OdeSystem;
use crate::quartic::shifted_operator_coeffs;

/// Odd extension of `u ↦ u^p`, so trajectories can be followed slightly past
/// a zero of `u` while a sign change is being located.
pub fn odd_power(u: f64, p: f64) -> f64 {
    u.signum() * u.abs().powf(p)
}

/// `u = φ, w = φ′, v = Δφ, z = (Δφ)′` as functions of `r`.
#[derive(Debug, Clone, Copy)]
pub struct RadialSystem {
    pub n: f64,
    pub p: f64,
}

impl OdeSystem<4> for RadialSystem {
    fn rhs(&self, r: f64, y: &[f64; 4], dy: &mut [f64; 4]) {
        let k = (self.n - 1.0) / r;
        dy[0] = y[1];
        dy[1] = y[2] - k * y[1];
        dy[2] = y[3];
        dy[3] = odd_power(y[0], self.p) - k * y[3];
    }
}

/// Regular series start at small `r`.
pub fn taylor_seed(n: f64, p: f64, alpha: f64, v0: f64, r: f64) -> [f64; 4] {
    let ap = alpha.powf(p);
    let r2 = r * r;
    [
        alpha + v0 * r2 / (2.0 * n) + ap * r2 * r2 / (8.0 * n * (n + 2.0)),
        v0 * r / n + ap * r * r2 / (2.0 * n * (n + 2.0)),
        v0 + ap * r2 / (2.0 * n),
        ap * r / n,
    ]
}

/// `Q₄(m − ∂ₛ)W = W^p` rewritten for `Y = W − L` with state `(Y, Y′, Y″, Y‴)`:
/// `Y⁗ = N(Y) − c₀Y − c₁Y′ − c₂Y″ − c₃Y‴`, `N(Y) = (L+Y)^p − L^p`.
#[derive(Debug, Clone, Copy)]
pub struct EmdenFowlerSystem {
    pub p: f64,
    pub amplitude: f64,
    pub coeffs: [f64; 5],
}

impl EmdenFowlerSystem {
    pub fn new(n: u32, p: f64, amplitude: f64) -> Self {
        Self { p, amplitude, coeffs: shifted_operator_coeffs(n, 4.0 / (p - 1.0)) }
    }

    /// `(L+Y)^p − L^p`, accurate to full relative precision for tiny `Y`.
    pub fn increment(&self, y: f64) -> f64 {
        let l = self.amplitude;
        let x = y / l;
        if x > -1.0 {
            l.powf(self.p) * (self.p * x.ln_1p()).exp_m1()
        } else {
            odd_power(l + y, self.p) - l.powf(self.p)
        }
    }
}

impl OdeSystem<4> for EmdenFowlerSystem {
    fn rhs(&self, _s: f64, y: &[f64; 4], dy: &mut [f64; 4]) {
        let c = &self.coeffs;
        dy[0] = y[1];
        dy[1] = y[2];
        dy[2] = y[3];
        dy[3] = self.increment(y[0]) - c[0] * y[0] - c[1] * y[1] - c[2] * y[2] - c[3] * y[3];
    }
}

/// Radial state `(φ, φ′, Δφ, (Δφ)′)` at `r` → `(Y, Y′, Y″, Y‴)` at `s = ln r`.
pub fn radial_to_ef(n: f64, m: f64, amplitude: f64, r: f64, st: &[f64; 4]) -> [f64; 4] {
    let [u, w, v, z] = *st;
    let d2 = v - (n - 1.0) * w / r;
    let d3 = z - (n - 1.0) * (d2 / r - w / (r * r));
    // θᵏu with θ = r·d/dr
    let t1 = r * w;
    let t2 = t1 + r * r * d2;
    let t3 = t1 + 3.0 * r * r * d2 + r * r * r * d3;
    let rm = r.powf(m);
    [
        rm * u - amplitude,
        rm * (m * u + t1),
        rm * (m * m * u + 2.0 * m * t1 + t2),
        rm * (m * m * m * u + 3.0 * m * m * t1 + 3.0 * m * t2 + t3),
    ]
}

/// Inverse of [`radial_to_ef`].
pub fn ef_to_radial(n: f64, m: f64, amplitude: f64, s: f64, st: &[f64; 4]) -> [f64; 4] {
    let w0 = amplitude + st[0];
    let [w1, w2, w3] = [st[1], st[2], st[3]];
    let e = (-m * s).exp();
    let r = s.exp();
    let u = e * w0;
    let t1 = e * (w1 - m * w0);
    let t2 = e * (w2 - 2.0 * m * w1 + m * m * w0);
    let t3 = e * (w3 - 3.0 * m * w2 + 3.0 * m * m * w1 - m * m * m * w0);
    let du = t1 / r;
    let r2d2 = t2 - t1;
    let d2 = r2d2 / (r * r);
    let d3 = (t3 - t1 - 3.0 * r2d2) / (r * r * r);
    let lap = d2 + (n - 1.0) * du / r;
    let dlap = d3 + (n - 1.0) * (d2 / r - du / (r * r));
    [u, du, lap, dlap]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_conversions_round_trip() {
        let (n, m, l) = (13.0, 0.15, 1.13);
        let st = [0.7, -0.03, -0.02, 0.004];
        for r in [0.05, 1.0, 7.5, 300.0] {
            let ef = radial_to_ef(n, m, l, r, &st);
            let back = ef_to_radial(n, m, l, r.ln(), &ef);
            for i in 0..4 {
                assert!((back[i] - st[i]).abs() < 1e-9 * st[i].abs().max(1e-3), "{r} {i}");
            }
        }
    }

    #[test]
    fn power_profile_maps_to_constant() {
        // φ = L·r^{-m} is the singular solution; its EF image is Y ≡ 0.
        let (n, m, l) = (13.0, 0.2, 1.3);
        let r: f64 = 3.0;
        let u = l * r.powf(-m);
        let w = -m * u / r;
        let d2 = m * (m + 1.0) * u / (r * r);
        let v = d2 + (n - 1.0) * w / r;
        // Δ(r^{-m}) = −m(n−2−m) r^{-m-2}, so (Δφ)′ = m(n−2−m)(m+2) L r^{-m-3}
        let z = m * (n - 2.0 - m) * (m + 2.0) * l * r.powf(-m - 3.0);
        let ef = radial_to_ef(n, m, l, r, &[u, w, v, z]);
        for x in ef {
            assert!(x.abs() < 1e-13);
        }
    }

    #[test]
    fn increment_is_accurate_for_tiny_arguments() {
        let sys = EmdenFowlerSystem::new(13, 28.0, 1.13);
        let y = 1e-30;
        let lin = 28.0 * 1.13f64.powf(27.0) * y;
        assert!((sys.increment(y) - lin).abs() / lin < 1e-12);
    }
}
