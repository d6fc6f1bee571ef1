//! A depth-3 regression tree on x ↦ Σ_j x_j, explained through its leaves.
//!
//! `cargo run --release --example cart_partition`

use tabular_lime::harness::{run_experiment, DataSource, ExperimentConfig, XiSpec};
use tabular_lime::models::{fit_cart, ModelSpec};

fn main() -> tabular_lime::Result<()> {
    let d = 5;
    let train = DataSource::uniform_points(0.0, 1.0, d, 2000, 12);
    let y: Vec<f64> = train.iter().map(|x| x.iter().sum()).collect();
    let tree = fit_cart(&train, &y, 3);
    let ModelSpec::Partition { cells } = &tree else { unreachable!() };
    println!("{} leaves", cells.len());

    let mut cfg = ExperimentConfig::new(DataSource::Uniform { low: 0.0, high: 1.0, dim: d, m: 2000, seed: 12 }, tree);
    cfg.xi = XiSpec::BinCenter { bin_center: vec![1, 2, 3, 4, 2] };
    cfg.repetitions = 40;
    let report = run_experiment(&cfg)?;
    for s in &report.summary {
        println!("k = {}  theory {:>8.4}  mean β̂ {:>8.4} ± {:.4}  {}", s.feature_index, s.beta_theory, s.beta_hat_mean, s.beta_hat_se, if s.pass { "ok" } else { "off" });
    }
    Ok(())
}
