//! Sample-size, robustness and operator-norm bounds.

use super::c_const;

/// Smallest n for which the convergence guarantee holds at accuracy `eps`
/// with probability 1 − `eta`, saturating at `u128::MAX`.
pub fn sample_size_bound(eps: f64, eta: f64, d: usize, p: usize, nu: f64, c_f: f64) -> u128 {
    let (df, pf) = (d as f64, p as f64);
    let big_c = c_const(p, nu).powi(d as i32);
    let log_term = (8.0 * df / eta).ln();
    let inv_nu2 = 1.0 / (nu * nu);
    let first = 2f64.powi(12) * c_f * df.powi(4) * pf.powi(4) * inv_nu2.exp() * log_term / (big_c * big_c * eps * eps);
    let second =
        2f64.powi(15) * c_f * c_f * df.powi(7) * pf.powi(8) * (2.0 * inv_nu2).exp() * log_term / (big_c.powi(4) * eps * eps);
    // float-to-int casts saturate
    first.max(second).ceil() as u128
}

/// Upper bound on ‖β^f − β^g‖ given ‖f − g‖_∞.
pub fn robustness_bound(d: usize, p: usize, nu: f64, sup_norm_diff: f64) -> f64 {
    let (df, pf) = (d as f64, p as f64);
    (df * (9.0 * df + 4.0 * pf * pf)).sqrt() * (1.0 / (2.0 * nu * nu)).exp() / (pf - 1.0) * sup_norm_diff
}

/// Upper bound on the spectral norm of Σ⁻¹.
pub fn sigma_inv_norm_bound(big_c: f64, d: usize, p: usize, nu: f64) -> f64 {
    2.0 * std::f64::consts::SQRT_2 / big_c * d as f64 * (p * p) as f64 * (2.0 / (nu * nu)).exp()
}
