//! Quantile discretization of a small synthetic dataset.
//!
//! `cargo run --example fit_grid`

use tabular_lime::grid::fit_grid;
use tabular_lime::harness::DataSource;

fn main() -> tabular_lime::Result<()> {
    let train = DataSource::uniform_points(-10.0, 10.0, 3, 2000, 1);
    let grid = fit_grid(&train, 4)?;
    for j in 0..grid.d() {
        println!("feature {j}");
        for b in 0..grid.p() {
            let (lo, hi) = grid.bin_bounds(j, b);
            println!(
                "  bin {}: ({lo:>8.4}, {hi:>8.4}]  mean {:>8.4}  std {:.4}",
                b + 1,
                grid.bin_means()[j][b],
                grid.bin_stds()[j][b]
            );
        }
    }
    let xi = [0.5, -7.0, 9.9];
    println!("ξ = {xi:?} falls in bins {:?} (0-based)", grid.bin_id(&xi)?.0);
    println!("{}", grid.to_json()?);
    Ok(())
}
