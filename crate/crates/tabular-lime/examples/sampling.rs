//! Perturbed samples around ξ with their interpretable features and
//! default weights, written as CSV.
//!
//! `cargo run --example sampling`

use tabular_lime::grid::fit_grid;
use tabular_lime::harness::DataSource;
use tabular_lime::sampler::{sample_batch, weights_default};

fn main() -> tabular_lime::Result<()> {
    let grid = fit_grid(&DataSource::uniform_points(0.0, 1.0, 2, 500, 3), 4)?;
    let xi = [0.3, 0.9];
    let b_star = grid.bin_id(&xi)?;
    let batch = sample_batch(&grid, &b_star, 8, 42)?;
    let pi = weights_default(&batch.z, 1.0)?;
    batch.write_csv(std::io::stdout(), &pi)?;

    // fraction of samples sharing ξ's bin, per feature: about 1/p
    let big = sample_batch(&grid, &b_star, 100_000, 7)?;
    for j in 0..grid.d() {
        let share = big.z.iter().filter(|z| z[j] == 1).count() as f64 / big.n() as f64;
        println!("feature {j}: share in b⋆ = {share:.4}");
    }
    Ok(())
}
