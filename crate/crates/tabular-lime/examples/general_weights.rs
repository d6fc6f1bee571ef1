//! Smooth weights exp(−Σ_j (τ_j(ξ_j) − τ_j(x_j))²/(2ν²)) with τ_j a
//! rescaling: Σ, Σ⁻¹ and the limit explanation by quadrature, against a
//! Monte-Carlo estimate.
//!
//! `cargo run --release --example general_weights`

use tabular_lime::grid::fit_grid;
use tabular_lime::harness::DataSource;
use tabular_lime::models::{ModelSpec, UnaryFn};
use tabular_lime::numerics::linalg::{identity, matmul, max_abs_diff};
use tabular_lime::theory::{beta_general_with, limit_system, Method, Setting};

fn main() -> tabular_lime::Result<()> {
    let grid = fit_grid(&DataSource::uniform_points(-3.0, 3.0, 3, 3000, 2), 4)?;
    let tau = vec![UnaryFn::Rescale { lo: -3.0, hi: 3.0 }; 3];
    let xi = [0.4, -1.0, 2.2];
    let s = Setting::general_weights(&grid, &xi, tau, 0.5, 1e-10)?;
    let model = ModelSpec::Additive { terms: vec![UnaryFn::identity(), UnaryFn::Sine { amplitude: 1.0, frequency: 1.0, phase: 0.0 }, UnaryFn::Constant { value: 1.0 }] };

    let sys = limit_system(&model, &s, Method::Quadrature)?;
    println!("‖ΣΣ⁻¹ − I‖_max = {:.2e}", max_abs_diff(&matmul(&sys.sigma, &sys.sigma_inv), &identity(4)));
    let exact = beta_general_with(&model, &s, Method::Quadrature)?;
    let mc = beta_general_with(&model, &s, Method::MonteCarlo { n: 400_000, seed: 1 })?;
    let se = mc.std_errors.clone().unwrap_or_default();
    for (k, ((a, b), e)) in exact.as_vector().iter().zip(mc.as_vector()).zip(se).enumerate() {
        println!("β_{k}: quadrature {a:>9.5}  monte carlo {b:>9.5} ± {e:.5}");
    }
    Ok(())
}
