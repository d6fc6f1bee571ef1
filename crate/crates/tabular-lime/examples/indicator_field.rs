//! Explanations of a single-bin indicator at every bin centre of a 2-D grid.
//! Positive coefficients appear exactly on the row and column through the
//! indicator's bin.
//!
//! `cargo run --example indicator_field > field.csv`

use tabular_lime::grid::fit_grid;
use tabular_lime::harness::{field_map, write_field_csv, DataSource};
use tabular_lime::models::{ModelSpec, Rectangle};

fn main() -> tabular_lime::Result<()> {
    let grid = fit_grid(&DataSource::uniform_points(0.0, 4.0, 2, 4000, 8), 4)?;
    let (a0, b0) = grid.bin_bounds(0, 1);
    let (a1, b1) = grid.bin_bounds(1, 2);
    let model = ModelSpec::IndicatorRect { rect: Rectangle::new(vec![a0, a1], vec![b0, b1])?, value: 1.0 };
    let rows = field_map(&model, &grid, 1.0)?;
    write_field_csv(&rows, std::io::stdout())?;
    Ok(())
}
