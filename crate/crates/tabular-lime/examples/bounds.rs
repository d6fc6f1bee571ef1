//! The sample-size, robustness and ‖Σ⁻¹‖ bounds next to the quantities
//! they control.
//!
//! `cargo run --example bounds`

use tabular_lime::grid::fit_grid;
use tabular_lime::harness::DataSource;
use tabular_lime::models::{ModelSpec, UnaryFn};
use tabular_lime::numerics::linalg::symmetric_spectral_norm;
use tabular_lime::theory::{
    beta_additive, c_const, default_nu, limit_system, robustness_bound, sample_size_bound, sigma_inv_norm_bound, Method,
    Setting,
};

fn main() -> tabular_lime::Result<()> {
    let nu = default_nu(10);
    println!("n needed for ε = 0.1, η = 0.01, d = 10, p = 4: {}", sample_size_bound(0.1, 0.01, 10, 4, nu, 1.0));

    let (d, p, nu) = (3, 4, 1.0);
    let grid = fit_grid(&DataSource::uniform_points(-1.0, 1.0, d, 2000, 4), p)?;
    let b_star = grid.bin_id(&[0.1, 0.5, -0.9])?;
    let f = vec![UnaryFn::identity(), UnaryFn::Polynomial { coeffs: vec![0.0, 0.0, 1.0] }, UnaryFn::Sine { amplitude: 0.5, frequency: 3.0, phase: 0.0 }];
    let mut g = f.clone();
    g[0] = UnaryFn::Polynomial { coeffs: vec![0.1, 1.05] };
    let h_sup = (0..=200).map(|i| -1.0 + i as f64 / 100.0).map(|x| (f[0].eval(x) - g[0].eval(x)).abs()).fold(0.0, f64::max);
    let bf = beta_additive(&f, &grid, &b_star, nu, 1e-10)?.as_vector();
    let bg = beta_additive(&g, &grid, &b_star, nu, 1e-10)?.as_vector();
    let gap = bf.iter().zip(&bg).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    println!("‖β^f − β^g‖ = {gap:.4} ≤ {:.4}", robustness_bound(d, p, nu, h_sup));

    let s = Setting::default_weights(&grid, &b_star, nu, 1e-10)?;
    let sys = limit_system(&ModelSpec::Additive { terms: f }, &s, Method::Quadrature)?;
    let big_c = c_const(p, nu).powi(d as i32);
    println!("‖Σ⁻¹‖ = {:.3} ≤ {:.3}", symmetric_spectral_norm(&sys.sigma_inv), sigma_inv_norm_bound(big_c, d, p, nu));
    Ok(())
}
