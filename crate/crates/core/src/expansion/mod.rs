//! The nonlinearity `g`, the variation-of-parameters representation of `Z`,
//! and fits of the three large-`r` expansion regimes.

pub mod fit;
pub mod kernel;
pub mod nonlinearity;
pub mod regime;

pub use fit::{basis, fit_expansion, fit_expansion_with, FitOptions, Weighting, window_shift_stability, Coefficient, ExpansionFit, ShiftStability};
pub use kernel::{apply_factored_operator, kernel_oracle_residual, representation_check, variation_kernel, VariationKernel};
pub use nonlinearity::{g_eval, taylor_coeffs, Nonlinearity};
pub use regime::{detect_regime, ordering_chain, Regime, RUNG_TOL};
