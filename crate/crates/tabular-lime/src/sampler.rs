//! Perturbation sampling and sample weights.
//!
//! Row `i` of a batch draws from its own ChaCha8 stream (stream id `i`) and
//! coordinate `j` reads from a fixed word offset inside it, so every entry is
//! keyed by (seed, i, j) and rows can be filled in any order.

use crate::error::{Error, Result};
use crate::grid::{BinGrid, BinIndices};
use crate::models::UnaryFn;
use crate::numerics::TruncNormalParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;

/// 32-bit words reserved per coordinate inside a row stream.
const WORDS_PER_COORD: u128 = 32;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of repetition `rep` derived from a master seed.
pub fn repetition_seed(seed: u64, rep: u64) -> u64 {
    mix64(mix64(seed) ^ rep.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Deterministic stream positioned at coordinate `j` of row `i`.
pub fn keyed_stream(seed: u64, i: u64, j: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(mix64(seed));
    rng.set_stream(i);
    rng.set_word_pos(j as u128 * WORDS_PER_COORD);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationBatch {
    pub seed: u64,
    /// Drawn bin per entry (0-based), n × d.
    pub bins: Vec<Vec<usize>>,
    pub x: Vec<Vec<f64>>,
    pub z: Vec<Vec<u8>>,
}

impl PerturbationBatch {
    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn d(&self) -> usize {
        self.x.first().map_or(0, Vec::len)
    }

    /// Dump as long-format CSV with columns i, j, bin, x, z, pi (bins 1-based).
    pub fn write_csv<W: Write>(&self, w: W, pi: &WeightVector) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["i", "j", "bin", "x", "z", "pi"])?;
        for i in 0..self.n() {
            for j in 0..self.d() {
                wr.write_record(&[
                    i.to_string(),
                    j.to_string(),
                    (self.bins[i][j] + 1).to_string(),
                    self.x[i][j].to_string(),
                    self.z[i][j].to_string(),
                    pi.pi[i].to_string(),
                ])?;
            }
        }
        wr.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightVector {
    pub pi: Vec<f64>,
    pub nu: f64,
}

/// Truncated-normal laws of every (feature, bin) pair.
pub fn bin_laws(grid: &BinGrid) -> Result<Vec<Vec<TruncNormalParams>>> {
    (0..grid.d()).map(|j| (0..grid.p()).map(|b| grid.trunc_params(j, b)).collect()).collect()
}

/// Draw `n` perturbed examples around the bin `b_star`.
pub fn sample_batch(grid: &BinGrid, b_star: &BinIndices, n: usize, seed: u64) -> Result<PerturbationBatch> {
    if n == 0 {
        return Err(Error::InvalidParameter("batch size must be positive".into()));
    }
    if b_star.len() != grid.d() {
        return Err(Error::DimensionMismatch { expected: grid.d(), found: b_star.len() });
    }
    let laws = bin_laws(grid)?;
    let (d, p) = (grid.d(), grid.p());
    let rows: Vec<(Vec<usize>, Vec<f64>, Vec<u8>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut bins = Vec::with_capacity(d);
            let mut xs = Vec::with_capacity(d);
            let mut zs = Vec::with_capacity(d);
            for j in 0..d {
                let mut rng = keyed_stream(seed, i as u64, j as u64);
                let b = rng.random_range(0..p);
                let law = &laws[j][b];
                let mut x = law.sample(&mut rng);
                if b > 0 && x <= law.lo {
                    x = law.lo.next_up();
                }
                bins.push(b);
                xs.push(x);
                zs.push(u8::from(b == b_star.get(j)));
            }
            (bins, xs, zs)
        })
        .collect();
    let mut batch = PerturbationBatch { seed, bins: Vec::with_capacity(n), x: Vec::with_capacity(n), z: Vec::with_capacity(n) };
    for (b, x, z) in rows {
        batch.bins.push(b);
        batch.x.push(x);
        batch.z.push(z);
    }
    Ok(batch)
}

/// π_i = exp(−#{j : z_ij = 0}/(2ν²)).
pub fn weights_default(z: &[Vec<u8>], nu: f64) -> Result<WeightVector> {
    if !(nu > 0.0) {
        return Err(Error::InvalidParameter(format!("bandwidth ν = {nu} must be positive")));
    }
    let scale = 1.0 / (2.0 * nu * nu);
    let pi = z
        .iter()
        .map(|row| {
            let misses = row.iter().filter(|&&v| v == 0).count() as f64;
            (-misses * scale).exp()
        })
        .collect();
    Ok(WeightVector { pi, nu })
}

/// π_i = exp(−Σ_j (τ_j(ξ_j) − τ_j(x_ij))²/(2ν²)); every sampled
/// |τ_j(ξ_j) − τ_j(x_ij)| must be at most 1.
pub fn weights_general(x: &[Vec<f64>], xi: &[f64], tau: &[UnaryFn], nu: f64) -> Result<WeightVector> {
    if !(nu > 0.0) {
        return Err(Error::InvalidParameter(format!("bandwidth ν = {nu} must be positive")));
    }
    if tau.len() != xi.len() {
        return Err(Error::DimensionMismatch { expected: xi.len(), found: tau.len() });
    }
    let anchor: Vec<f64> = tau.iter().zip(xi).map(|(t, &v)| t.eval(v)).collect();
    let scale = 1.0 / (2.0 * nu * nu);
    let mut pi = Vec::with_capacity(x.len());
    for row in x {
        let mut log_w = 0.0;
        for (j, (t, &v)) in tau.iter().zip(row).enumerate() {
            let diff = anchor[j] - t.eval(v);
            if diff.abs() > 1.0 + 1e-12 {
                return Err(Error::BoundednessViolation { index: j, spread: diff.abs() });
            }
            log_w -= diff * diff * scale;
        }
        pi.push(log_w.exp());
    }
    Ok(WeightVector { pi, nu })
}
