//! Running an experiment from a TOML document, writing the summary and
//! per-repetition CSVs the plotting scripts consume.
//!
//! `cargo run --release --example config_run -- [output-dir]`

use tabular_lime::harness::{run_experiment, ExperimentConfig};

const CONFIG: &str = r#"
p = 4
nu = "default"
n = 5000
lambda = 1.0
repetitions = 50
seed = 2024
xi = { bin_center = [2, 3, 1, 4] }

[data]
kind = "uniform"
low = -10.0
high = 10.0
dim = 4
m = 5000
seed = 1

[model]
model = "multiplicative"
factors = [
  { kind = "gaussian", center = 0.0, width = 8.0 },
  { kind = "gaussian", center = 2.0, width = 6.0 },
  { kind = "constant", value = 1.0 },
  { kind = "rescale", lo = -10.0, hi = 10.0 },
]

[outputs]
summary_csv = "summary.csv"
repetitions_csv = "repetitions.csv"
"#;

fn main() -> tabular_lime::Result<()> {
    let mut cfg = ExperimentConfig::parse(CONFIG)?;
    cfg.base_dir = std::env::args().nth(1).map(Into::into).unwrap_or_else(std::env::temp_dir);
    let report = run_experiment(&cfg)?;
    report.write_summary_csv(std::io::stdout())?;
    eprintln!("wrote summary.csv and repetitions.csv under {}", cfg.base_dir.display());
    Ok(())
}
