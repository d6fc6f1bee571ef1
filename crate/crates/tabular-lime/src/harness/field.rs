use crate::error::{Error, Result};
use crate::grid::{BinGrid, BinIndices};
use crate::models::ModelSpec;
use crate::theory::{explain, ExplainOptions};
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Limit explanation at the centre of one 2-D bin (1-based indices).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldRow {
    pub bin_i: usize,
    pub bin_j: usize,
    pub beta_1: f64,
    pub beta_2: f64,
}

/// β^f at every bin centre of a two-feature grid, row-major in (bin_i, bin_j).
pub fn field_map(model: &ModelSpec, grid: &BinGrid, nu: f64) -> Result<Vec<FieldRow>> {
    if grid.d() != 2 {
        return Err(Error::InvalidParameter(format!("field maps need d = 2, got d = {}", grid.d())));
    }
    let p = grid.p();
    let mut rows = Vec::with_capacity(p * p);
    for i in 0..p {
        for j in 0..p {
            let e = explain(model, grid, &BinIndices(vec![i, j]), nu, ExplainOptions::default())?;
            rows.push(FieldRow { bin_i: i + 1, bin_j: j + 1, beta_1: e.coefficients[0], beta_2: e.coefficients[1] });
        }
    }
    Ok(rows)
}

/// Columns: bin_i, bin_j, beta_1, beta_2.
pub fn write_field_csv<W: Write>(rows: &[FieldRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}
