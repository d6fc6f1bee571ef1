//! Linear models: the limit explanation is λ_j·v_j, and v_j nearly vanishes
//! for uniform data with an odd number of bins.
//!
//! `cargo run --release --example theory_linear`

use tabular_lime::grid::fit_grid;
use tabular_lime::harness::{run_experiment, DataSource, ExperimentConfig, XiSpec};
use tabular_lime::models::ModelSpec;
use tabular_lime::theory::{beta_linear, default_nu};

fn main() -> tabular_lime::Result<()> {
    let d = 10;
    let train = DataSource::uniform_points(-10.0, 10.0, d, 20_000, 0);
    let lambdas: Vec<f64> = (0..d).map(|j| if j % 2 == 0 { 1.0 } else { -0.5 }).collect();
    let xi = vec![0.0; d];
    for p in [4, 5] {
        let grid = fit_grid(&train, p)?;
        let lin = beta_linear(0.0, &lambdas, &grid, &grid.bin_id(&xi)?, default_nu(d))?;
        let vmax = lin.v.iter().map(|v| v.abs()).fold(0.0, f64::max);
        println!("p = {p}: max |v_j| = {vmax:.4}");
    }

    let data = DataSource::Uniform { low: -10.0, high: 10.0, dim: d, m: 20_000, seed: 0 };
    let mut cfg = ExperimentConfig::new(data, ModelSpec::Linear { intercept: 0.0, coefficients: lambdas });
    cfg.xi = XiSpec::Point(xi);
    cfg.repetitions = 30;
    let report = run_experiment(&cfg)?;
    println!("{:>3} {:>10} {:>10} {:>10}", "k", "mean β̂", "se", "theory");
    for s in &report.summary {
        println!("{:>3} {:>10.4} {:>10.4} {:>10.4}", s.feature_index, s.beta_hat_mean, s.beta_hat_se, s.beta_theory);
    }
    println!("all within tolerance: {}", report.all_pass());
    Ok(())
}
