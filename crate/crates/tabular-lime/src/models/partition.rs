use super::{ProductTerm, UnaryFn};
use crate::error::{Error, Result};
use crate::grid::{BinGrid, BinIndices};
use serde::{Deserialize, Serialize};

/// Axis-aligned box ∏_j [lower_j, upper_j].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub rect: Rectangle,
    pub value: f64,
}

impl Rectangle {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let r = Self { lower, upper };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lower.len() != self.upper.len() {
            return Err(Error::DimensionMismatch { expected: self.lower.len(), found: self.upper.len() });
        }
        for (j, (s, t)) in self.lower.iter().zip(&self.upper).enumerate() {
            if !(s < t) {
                return Err(Error::InvalidParameter(format!("rectangle side {j}: need lower < upper")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains_closed(&self, x: &[f64]) -> bool {
        x.iter().enumerate().all(|(j, &v)| v >= self.lower[j] && v <= self.upper[j])
    }

    /// Membership in ∏ (s_j, t_j].
    pub fn contains_half_open(&self, x: &[f64]) -> bool {
        x.iter().enumerate().all(|(j, &v)| v > self.lower[j] && v <= self.upper[j])
    }

    pub fn product_term(&self, value: f64) -> ProductTerm {
        ProductTerm {
            weight: value,
            factors: (0..self.dim()).map(|j| (j, UnaryFn::Indicator { lo: self.lower[j], hi: self.upper[j] })).collect(),
        }
    }

    /// The grid bin containing the rectangle along each coordinate.
    pub fn enclosing_bins(&self, grid: &BinGrid) -> Result<BinIndices> {
        if self.dim() != grid.d() {
            return Err(Error::DimensionMismatch { expected: grid.d(), found: self.dim() });
        }
        (0..self.dim())
            .map(|j| {
                let (lo, hi) = grid.support(j);
                let mid = 0.5 * (self.lower[j] + self.upper[j]);
                let b = grid.bin_of(j, mid.clamp(lo, hi)).ok_or(Error::ContainmentViolation { index: j })?;
                let (qa, qb) = grid.bin_bounds(j, b);
                let slack = 1e-12 * (qb - qa);
                if self.lower[j] < qa - slack || self.upper[j] > qb + slack {
                    return Err(Error::ContainmentViolation { index: j });
                }
                Ok(b)
            })
            .collect::<Result<Vec<_>>>()
            .map(BinIndices)
    }
}

pub(super) fn evaluate_cells(cells: &[Cell], x: &[f64]) -> f64 {
    cells
        .iter()
        .find(|c| c.rect.contains_half_open(x))
        .or_else(|| cells.iter().find(|c| c.rect.contains_closed(x)))
        .map_or(0.0, |c| c.value)
}

/// Split every cell along the grid boundaries so each piece lies in a
/// single d-dimensional bin. Pieces outside the support are dropped.
pub fn refine_partition(cells: &[Cell], grid: &BinGrid) -> Result<Vec<Cell>> {
    let d = grid.d();
    let mut out = Vec::new();
    for cell in cells {
        if cell.rect.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: cell.rect.dim() });
        }
        let mut sides: Vec<Vec<(f64, f64)>> = Vec::with_capacity(d);
        for j in 0..d {
            let (lo, hi) = grid.support(j);
            let s = cell.rect.lower[j].max(lo);
            let t = cell.rect.upper[j].min(hi);
            let mut cuts = vec![s];
            cuts.extend(grid.boundaries()[j].iter().copied().filter(|&q| q > s && q < t));
            cuts.push(t);
            sides.push(cuts.windows(2).filter(|w| w[1] > w[0]).map(|w| (w[0], w[1])).collect());
        }
        if sides.iter().any(Vec::is_empty) {
            continue;
        }
        let mut idx = vec![0usize; d];
        loop {
            let lower = (0..d).map(|j| sides[j][idx[j]].0).collect();
            let upper = (0..d).map(|j| sides[j][idx[j]].1).collect();
            out.push(Cell { rect: Rectangle { lower, upper }, value: cell.value });
            let mut k = 0;
            while k < d {
                idx[k] += 1;
                if idx[k] < sides[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == d {
                break;
            }
        }
    }
    Ok(out)
}
