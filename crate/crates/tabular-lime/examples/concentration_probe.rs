//! The empirical normal equations concentrate at the n^{-1/2} rate.
//!
//! `cargo run --release --example concentration_probe`

use tabular_lime::harness::{concentration_probe, DataSource, ExperimentConfig};
use tabular_lime::models::{ModelSpec, UnaryFn};

fn main() -> tabular_lime::Result<()> {
    let model = ModelSpec::Multiplicative { factors: vec![UnaryFn::Gaussian { center: 0.0, width: 3.0 }; 5] };
    let cfg = ExperimentConfig::new(DataSource::Uniform { low: -5.0, high: 5.0, dim: 5, m: 5000, seed: 1 }, model);
    let ns = [2_500, 10_000, 40_000];
    let report = concentration_probe(&cfg, &ns, 20)?;
    for l in &report.levels {
        println!("n = {:>6}: median ‖Σ̂−Σ‖ = {:.3e}, median ‖Γ̂−Γ‖ = {:.3e}", l.n, l.sigma_median, l.gamma_median);
    }
    println!("Σ ratios {:?}", report.sigma_ratios);
    println!("Γ ratios {:?}", report.gamma_ratios);
    Ok(())
}
