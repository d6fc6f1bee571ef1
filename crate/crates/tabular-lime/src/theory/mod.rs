//! Limit explanations β^f = Σ⁻¹Γ^f and the closed forms behind them.
//!
//! [`beta_general`] handles any bounded model; the family-specific
//! functions in this module give the same numbers through shorter formulas
//! and serve as mutual cross-checks.

mod bounds;
mod closed;
mod ecoef;
mod system;

pub use bounds::{robustness_bound, sample_size_bound, sigma_inv_norm_bound};
pub use closed::{
    beta_additive, beta_indicator, beta_kernel, beta_linear, beta_multiplicative, beta_multiplicative_from_e,
    beta_partition, bin_distance, explain, kernel_e_coefficients, large_bandwidth_limit, relative_importance,
    ExplainOptions, LargeBandwidthLimit, LinearExplanation,
};
pub use ecoef::{e_coefficients, e_coefficients_with, ECoefficients, Normalizers, Setting, WeightScheme};
pub use system::{
    beta_general_with, gamma_monte_carlo, gamma_structured, limit_system, sigma_inverse, sigma_matrix, LimitSystem,
    Method,
};

use crate::error::Result;
use crate::grid::{BinGrid, BinIndices};
use crate::models::ModelSpec;
use crate::surrogate::Explanation;

/// c = 1/p + (1 − 1/p)·exp(−1/(2ν²)).
pub fn c_const(p: usize, nu: f64) -> f64 {
    let p = p as f64;
    1.0 / p + (1.0 - 1.0 / p) * (-1.0 / (2.0 * nu * nu)).exp()
}

/// √(0.75·d).
pub fn default_nu(d: usize) -> f64 {
    (0.75 * d as f64).sqrt()
}

/// β^f under default weights.
pub fn beta_general(model: &ModelSpec, grid: &BinGrid, b_star: &BinIndices, nu: f64, method: Method, tol: f64) -> Result<Explanation> {
    beta_general_with(model, &Setting::default_weights(grid, b_star, nu, tol)?, method)
}
