use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::params::ProblemParams;
use crate::stencil::{apply_central, central_weights};

/// An entire radial solution sampled on a uniform grid in `s = ln r`.
///
/// `r`-chart quantities and `s`-chart quantities share the grid: node `i` has
/// `r_grid[i] = exp(s_grid[i])`. `z` is computed with a 5-point central
/// stencil and is `NaN` on the two nodes at either end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSolution {
    pub params: ProblemParams,
    pub alpha: f64,
    pub v0: f64,
    pub amplitude: f64,
    /// The unstable eigenvalue used to form `Z = Y′ − λ₄Y`.
    pub lambda4: f64,
    pub ds: f64,
    pub r_grid: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    pub lap: Vec<f64>,
    pub dlap: Vec<f64>,
    pub s_grid: Vec<f64>,
    pub w: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    /// `(Y′, Y″, Y‴)` as carried by the integrator.
    pub y_derivs: Vec<[f64; 3]>,
    /// Bound on the uncertainty of `r^m φ` at the last node.
    pub error_estimate: f64,
    /// Number of restarts along the unstable direction needed to reach `r_max`.
    pub restarts: usize,
    /// Index of the first node integrated in the `s` chart.
    pub switch_index: usize,
}

impl RadialSolution {
    pub fn len(&self) -> usize {
        self.s_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s_grid.is_empty()
    }

    pub fn r_max(&self) -> f64 {
        *self.r_grid.last().unwrap_or(&0.0)
    }

    /// `r^m φ(r) / L` at the last node.
    pub fn limit_ratio(&self) -> f64 {
        self.w.last().map_or(f64::NAN, |w| w / self.amplitude)
    }

    /// Index of the node nearest to `s`.
    pub fn index_of(&self, s: f64) -> usize {
        let i = ((s - self.s_grid[0]) / self.ds).round();
        (i.max(0.0) as usize).min(self.len() - 1)
    }

    /// The solution for initial height `alpha` obtained from the exact scaling
    /// `φ ↦ κ^m φ(κ r)`, `κ = (alpha/α)^{1/m}`. In `s` this is a pure shift.
    pub fn rescale(&self, alpha: f64) -> RadialSolution {
        let m = self.params.m();
        let ln_k = (alpha / self.alpha).ln() / m;
        let k = ln_k.exp();
        let km = (m * ln_k).exp();
        let mut out = self.clone();
        out.alpha = alpha;
        out.v0 = self.v0 * km * k * k;
        out.s_grid = self.s_grid.iter().map(|s| s - ln_k).collect();
        out.r_grid = out.s_grid.iter().map(|s| s.exp()).collect();
        out.phi = self.phi.iter().map(|x| x * km).collect();
        out.dphi = self.dphi.iter().map(|x| x * km * k).collect();
        out.lap = self.lap.iter().map(|x| x * km * k * k).collect();
        out.dlap = self.dlap.iter().map(|x| x * km * k * k * k).collect();
        out
    }

    /// Writes `s, r, phi, W, Y, Z`, one row per node, with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "s,r,phi,W,Y,Z")?;
        for i in 0..self.len() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.s_grid[i], self.r_grid[i], self.phi[i], self.w[i], self.y[i], self.z[i]
            )?;
        }
        Ok(())
    }
}

/// `Z = Y′ − λ₄Y` with the 5-point central first derivative.
pub fn z_from_y(y: &[f64], ds: f64, lambda4: f64) -> Vec<f64> {
    let w = central_weights(2, ds, 1);
    let dy = apply_central(y, &w[1]);
    dy.iter().zip(y).map(|(d, y)| d - lambda4 * y).collect()
}
