//! A Gaussian-kernel model that reads only the first 5 of 11 features:
//! both the limit and the empirical explanations ignore the rest.
//!
//! `cargo run --release --example kernel_dummy`

use tabular_lime::harness::{run_experiment, DataSource, ExperimentConfig};
use tabular_lime::models::{KernelTerm, ModelSpec};

fn main() -> tabular_lime::Result<()> {
    let d = 11;
    let active: Vec<usize> = (0..5).collect();
    let terms = (0..3)
        .map(|i| KernelTerm {
            alpha: [1.0, -0.7, 0.4][i],
            gamma: 4.0,
            center: (0..d).map(|j| ((i * 7 + j * 3) % 11) as f64 - 5.0).collect(),
            active: Some(active.clone()),
        })
        .collect();
    let mut cfg = ExperimentConfig::new(DataSource::Uniform { low: -10.0, high: 10.0, dim: d, m: 5000, seed: 4 }, ModelSpec::KernelSum { terms });
    cfg.repetitions = 40;
    let report = run_experiment(&cfg)?;
    for s in &report.summary[1..] {
        let tag = if s.feature_index <= 5 { "used " } else { "dummy" };
        println!("{tag} x{:<2}  theory {:>10.3e}  mean β̂ {:>10.3e} ± {:.1e}", s.feature_index, s.beta_theory, s.beta_hat_mean, s.beta_hat_se);
    }
    Ok(())
}
