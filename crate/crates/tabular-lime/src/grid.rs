//! Quantile discretization of the training data.
//!
//! Bins are indexed from 0 in code. Bin `b` of feature `j` is the interval
//! (q[j][b], q[j][b+1]], except bin 0 which is closed on the left, so every
//! point of the support belongs to exactly one bin.

use crate::error::{Error, Result};
use crate::numerics::TruncNormalParams;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct BinGrid {
    p: usize,
    boundaries: Vec<Vec<f64>>,
    bin_means: Vec<Vec<f64>>,
    bin_stds: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct RawGrid {
    p: usize,
    boundaries: Vec<Vec<f64>>,
    bin_means: Vec<Vec<f64>>,
    bin_stds: Vec<Vec<f64>>,
}

impl TryFrom<RawGrid> for BinGrid {
    type Error = Error;
    fn try_from(r: RawGrid) -> Result<Self> {
        let g = BinGrid::from_parts(r.boundaries, r.bin_means, r.bin_stds)?;
        if g.p != r.p {
            return Err(Error::DimensionMismatch { expected: r.p, found: g.p });
        }
        Ok(g)
    }
}

impl From<BinGrid> for RawGrid {
    fn from(g: BinGrid) -> Self {
        RawGrid { p: g.p, boundaries: g.boundaries, bin_means: g.bin_means, bin_stds: g.bin_stds }
    }
}

/// Bin index of the example to explain along every feature (0-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinIndices(pub Vec<usize>);

impl BinIndices {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, j: usize) -> usize {
        self.0[j]
    }
}

/// Type-7 quantile of sorted data at level `alpha` ∈ [0, 1].
pub fn quantile_sorted(sorted: &[f64], alpha: f64) -> f64 {
    let m = sorted.len();
    let h = (m - 1) as f64 * alpha;
    let k = h.floor() as usize;
    if k + 1 >= m {
        return sorted[m - 1];
    }
    sorted[k] + (h - k as f64) * (sorted[k + 1] - sorted[k])
}

/// Fit the p-quantile grid on `train` (rows are examples).
pub fn fit_grid(train: &[Vec<f64>], p: usize) -> Result<BinGrid> {
    if p < 2 {
        return Err(Error::InvalidParameter(format!("p = {p} must be at least 2")));
    }
    let m = train.len();
    if m == 0 {
        return Err(Error::InsufficientData("no training rows".into()));
    }
    let d = train[0].len();
    if d == 0 {
        return Err(Error::InsufficientData("training rows have no features".into()));
    }
    for row in train {
        if row.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: row.len() });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("training data".into()));
        }
    }
    let mut boundaries = Vec::with_capacity(d);
    let mut means = Vec::with_capacity(d);
    let mut stds = Vec::with_capacity(d);
    for j in 0..d {
        let mut col: Vec<f64> = train.iter().map(|r| r[j]).collect();
        col.sort_by(f64::total_cmp);
        let q: Vec<f64> = (0..=p).map(|b| quantile_sorted(&col, b as f64 / p as f64)).collect();
        if q.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InsufficientData(format!(
                "feature {j}: quantile boundaries collapse, cannot host {p} bins"
            )));
        }
        let mut sums = vec![0.0; p];
        let mut counts = vec![0usize; p];
        let mut members: Vec<Vec<f64>> = vec![Vec::new(); p];
        for &v in &col {
            let b = locate(&q, v).expect("training values lie in their own support");
            sums[b] += v;
            counts[b] += 1;
            members[b].push(v);
        }
        if let Some(b) = counts.iter().position(|&c| c == 0) {
            return Err(Error::InsufficientData(format!("feature {j}: bin {b} is empty")));
        }
        let mu: Vec<f64> = (0..p).map(|b| sums[b] / counts[b] as f64).collect();
        let sd: Vec<f64> = (0..p)
            .map(|b| {
                let var = members[b].iter().map(|v| (v - mu[b]).powi(2)).sum::<f64>() / counts[b] as f64;
                var.sqrt()
            })
            .collect();
        boundaries.push(q);
        means.push(mu);
        stds.push(sd);
    }
    BinGrid::from_parts(boundaries, means, stds)
}

fn locate(q: &[f64], x: f64) -> Option<usize> {
    let p = q.len() - 1;
    if !(x >= q[0] && x <= q[p]) {
        return None;
    }
    // first boundary index b ≥ 1 with x ≤ q[b]
    let b = q[1..].partition_point(|&edge| edge < x);
    Some(b.min(p - 1))
}

impl BinGrid {
    /// Assemble a grid from explicit parts; every bin must define a valid
    /// truncated normal after sigma clamping.
    pub fn from_parts(boundaries: Vec<Vec<f64>>, bin_means: Vec<Vec<f64>>, bin_stds: Vec<Vec<f64>>) -> Result<Self> {
        let d = boundaries.len();
        if d == 0 {
            return Err(Error::InvalidParameter("grid needs at least one feature".into()));
        }
        let p = boundaries[0].len().saturating_sub(1);
        if p < 2 {
            return Err(Error::InvalidParameter("grid needs p ≥ 2 bins".into()));
        }
        if bin_means.len() != d || bin_stds.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: bin_means.len().min(bin_stds.len()) });
        }
        for j in 0..d {
            if boundaries[j].len() != p + 1 || bin_means[j].len() != p || bin_stds[j].len() != p {
                return Err(Error::DimensionMismatch { expected: p, found: bin_means[j].len() });
            }
            let all = boundaries[j].iter().chain(&bin_means[j]).chain(&bin_stds[j]);
            if all.into_iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("grid feature {j}")));
            }
            if boundaries[j].windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::InsufficientData(format!("feature {j}: boundaries not strictly increasing")));
            }
            if bin_stds[j].iter().any(|&s| s < 0.0) {
                return Err(Error::InvalidParameter(format!("feature {j}: negative bin std")));
            }
        }
        let grid = Self { p, boundaries, bin_means, bin_stds };
        for j in 0..d {
            for b in 0..p {
                grid.trunc_params(j, b)?;
            }
        }
        Ok(grid)
    }

    pub fn d(&self) -> usize {
        self.boundaries.len()
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn boundaries(&self) -> &[Vec<f64>] {
        &self.boundaries
    }

    pub fn bin_means(&self) -> &[Vec<f64>] {
        &self.bin_means
    }

    pub fn bin_stds(&self) -> &[Vec<f64>] {
        &self.bin_stds
    }

    /// (q[j][b], q[j][b+1]).
    pub fn bin_bounds(&self, j: usize, b: usize) -> (f64, f64) {
        (self.boundaries[j][b], self.boundaries[j][b + 1])
    }

    pub fn bin_center(&self, j: usize, b: usize) -> f64 {
        let (lo, hi) = self.bin_bounds(j, b);
        0.5 * (lo + hi)
    }

    /// [q[j][0], q[j][p]].
    pub fn support(&self, j: usize) -> (f64, f64) {
        (self.boundaries[j][0], self.boundaries[j][self.p])
    }

    /// Sampling law of feature `j` in bin `b`, with sigma clamped to
    /// max(σ, 1e−9·width, 1e−12).
    pub fn trunc_params(&self, j: usize, b: usize) -> Result<TruncNormalParams> {
        let (lo, hi) = self.bin_bounds(j, b);
        let sigma = self.bin_stds[j][b].max(1e-9 * (hi - lo)).max(1e-12);
        TruncNormalParams::new(self.bin_means[j][b], sigma, lo, hi)
    }

    /// Bin containing `x` along feature `j`, if `x` lies in the support.
    pub fn bin_of(&self, j: usize, x: f64) -> Option<usize> {
        locate(&self.boundaries[j], x)
    }

    /// Bin indices of `xi`; every coordinate must lie in the support.
    pub fn bin_id(&self, xi: &[f64]) -> Result<BinIndices> {
        if xi.len() != self.d() {
            return Err(Error::DimensionMismatch { expected: self.d(), found: xi.len() });
        }
        xi.iter()
            .enumerate()
            .map(|(j, &x)| {
                self.bin_of(j, x).ok_or_else(|| {
                    let (lo, hi) = self.support(j);
                    Error::OutOfSupport { index: j, value: x, lo, hi }
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(BinIndices)
    }

    /// A point whose bin indices are `b` (the bin midpoints).
    pub fn bin_center_point(&self, b: &BinIndices) -> Vec<f64> {
        b.0.iter().enumerate().map(|(j, &bj)| self.bin_center(j, bj)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Read a numeric CSV (one example per row). A first row that does not
/// parse as numbers is treated as a header.
pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path)?;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if i == 0 => continue,
            Err(e) => return Err(Error::Config(format!("row {}: {e}", i + 1))),
        }
    }
    Ok(rows)
}
