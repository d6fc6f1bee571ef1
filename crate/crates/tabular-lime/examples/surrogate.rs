//! A single LIME fit on an additive model next to its limit explanation.
//!
//! `cargo run --release --example surrogate`

use tabular_lime::grid::fit_grid;
use tabular_lime::harness::{lime_once, DataSource};
use tabular_lime::models::{ModelSpec, UnaryFn};
use tabular_lime::numerics::DEFAULT_TOL;
use tabular_lime::theory::{beta_additive, default_nu};

fn main() -> tabular_lime::Result<()> {
    let grid = fit_grid(&DataSource::uniform_points(-2.0, 2.0, 3, 3000, 5), 4)?;
    let terms = vec![
        UnaryFn::Sine { amplitude: 1.0, frequency: 1.5, phase: 0.0 },
        UnaryFn::Polynomial { coeffs: vec![0.0, 0.0, 0.5] },
        UnaryFn::Constant { value: 2.0 },
    ];
    let model = ModelSpec::Additive { terms: terms.clone() };
    let xi = [1.2, -0.4, 0.0];
    let b_star = grid.bin_id(&xi)?;
    let nu = default_nu(3);

    let theory = beta_additive(&terms, &grid, &b_star, nu, DEFAULT_TOL)?;
    println!("limit       {:?}", theory.as_vector());
    for n in [1_000, 10_000, 100_000] {
        let e = lime_once(&model, &grid, &b_star, n, nu, 1.0, 9)?;
        println!("n = {n:>6}  {:?}  max gap {:.2e}", e.as_vector(), e.max_abs_diff(&theory));
    }
    Ok(())
}
