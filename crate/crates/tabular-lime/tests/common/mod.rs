#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tabular_lime::grid::{fit_grid, BinGrid, BinIndices};
use tabular_lime::models::{Cell, KernelTerm, ModelSpec, Rectangle, UnaryFn};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Grid fitted to m points whose feature laws vary between uniform,
/// bell-shaped and skewed.
pub fn random_grid(r: &mut ChaCha8Rng, d: usize, p: usize, m: usize) -> BinGrid {
    let kinds: Vec<u8> = (0..d).map(|_| r.random_range(0..3)).collect();
    let scale: Vec<f64> = (0..d).map(|_| r.random_range(0.5..3.0)).collect();
    let train: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            (0..d)
                .map(|j| {
                    let u: f64 = r.random();
                    let v = match kinds[j] {
                        0 => 2.0 * u - 1.0,
                        1 => (0..4).map(|_| r.random::<f64>()).sum::<f64>() / 2.0 - 1.0,
                        _ => -(1.0 - u).ln() / 2.0 - 0.5,
                    };
                    scale[j] * v
                })
                .collect()
        })
        .collect();
    fit_grid(&train, p).unwrap()
}

pub fn random_bins(r: &mut ChaCha8Rng, d: usize, p: usize) -> BinIndices {
    BinIndices((0..d).map(|_| r.random_range(0..p)).collect())
}

fn in_support(r: &mut ChaCha8Rng, g: &BinGrid, j: usize) -> f64 {
    let (lo, hi) = g.support(j);
    r.random_range(lo..hi)
}

pub fn random_linear(r: &mut ChaCha8Rng, d: usize) -> ModelSpec {
    ModelSpec::Linear { intercept: r.random_range(-1.0..1.0), coefficients: (0..d).map(|_| r.random_range(-2.0..2.0)).collect() }
}

pub fn random_cubic(r: &mut ChaCha8Rng) -> UnaryFn {
    UnaryFn::Polynomial { coeffs: (0..4).map(|_| r.random_range(-1.0..1.0)).collect() }
}

pub fn random_additive(r: &mut ChaCha8Rng, d: usize) -> ModelSpec {
    ModelSpec::Additive { terms: (0..d).map(|_| random_cubic(r)).collect() }
}

pub fn random_multiplicative(r: &mut ChaCha8Rng, g: &BinGrid) -> ModelSpec {
    let factors = (0..g.d())
        .map(|j| UnaryFn::Gaussian { center: in_support(r, g, j), width: r.random_range(0.5..3.0) })
        .collect();
    ModelSpec::Multiplicative { factors }
}

/// A rectangle strictly inside one d-bin.
pub fn random_rect_in_bin(r: &mut ChaCha8Rng, g: &BinGrid, bins: &BinIndices) -> Rectangle {
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for j in 0..g.d() {
        let (lo, hi) = g.bin_bounds(j, bins.get(j));
        let a = r.random_range(0.0..0.6);
        let b = r.random_range(a + 0.2..1.0);
        lower.push(lo + a * (hi - lo));
        upper.push(lo + b * (hi - lo));
    }
    Rectangle::new(lower, upper).unwrap()
}

/// 2^d cells from one random cut per coordinate; cells cross bin edges.
pub fn random_partition(r: &mut ChaCha8Rng, g: &BinGrid) -> Vec<Cell> {
    let d = g.d();
    let cuts: Vec<(f64, f64, f64)> = (0..d)
        .map(|j| {
            let (lo, hi) = g.support(j);
            (lo, lo + r.random_range(0.2..0.8) * (hi - lo), hi)
        })
        .collect();
    (0..1usize << d)
        .map(|mask| {
            let lower = (0..d).map(|j| if mask >> j & 1 == 0 { cuts[j].0 } else { cuts[j].1 }).collect();
            let upper = (0..d).map(|j| if mask >> j & 1 == 0 { cuts[j].1 } else { cuts[j].2 }).collect();
            Cell { rect: Rectangle { lower, upper }, value: r.random_range(-2.0..2.0) }
        })
        .collect()
}

pub fn random_kernel(r: &mut ChaCha8Rng, g: &BinGrid, terms: usize) -> ModelSpec {
    let d = g.d();
    let terms = (0..terms)
        .map(|_| {
            let active: Vec<usize> = (0..d).filter(|_| r.random_bool(0.7)).collect();
            KernelTerm {
                alpha: r.random_range(-1.5..1.5),
                gamma: r.random_range(0.5..2.5),
                center: (0..d).map(|j| in_support(r, g, j)).collect(),
                active: if active.len() == d { None } else { Some(active) },
            }
        })
        .collect();
    ModelSpec::KernelSum { terms }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
