use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::numerics::linalg::{symmetric_spectral_norm, Matrix};
use crate::sampler::{repetition_seed, sample_batch, weights_default};
use crate::theory::{limit_system, Method, Setting};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeLevel {
    pub n: usize,
    /// ‖Σ̂_n − Σ‖ (spectral), one entry per trial.
    pub sigma_errors: Vec<f64>,
    /// ‖Γ̂_n − Γ‖ (Euclidean), one entry per trial.
    pub gamma_errors: Vec<f64>,
    pub sigma_median: f64,
    pub gamma_median: f64,
    /// Every entry of every Σ̂_n fell in [0, 1].
    pub sigma_entries_in_unit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub levels: Vec<ProbeLevel>,
    /// median(n_k)/median(n_{k+1}) for Σ.
    pub sigma_ratios: Vec<f64>,
    pub gamma_ratios: Vec<f64>,
}

impl ConcentrationReport {
    /// Entries in [0, 1] and every Σ ratio inside `band`.
    pub fn passes(&self, band: (f64, f64)) -> bool {
        self.levels.iter().all(|l| l.sigma_entries_in_unit) && self.sigma_ratios.iter().all(|r| *r >= band.0 && *r <= band.1)
    }

    /// Columns: n, trial, sigma_error, gamma_error.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["n", "trial", "sigma_error", "gamma_error"])?;
        for l in &self.levels {
            for (t, (s, g)) in l.sigma_errors.iter().zip(&l.gamma_errors).enumerate() {
                out.write_record([l.n.to_string(), t.to_string(), s.to_string(), g.to_string()])?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len();
    if m == 0 {
        f64::NAN
    } else if m % 2 == 1 {
        s[m / 2]
    } else {
        0.5 * (s[m / 2 - 1] + s[m / 2])
    }
}

/// Empirical Σ̂_n and Γ̂_n from one batch.
pub fn empirical_system(z: &[Vec<u8>], y: &[f64], pi: &[f64]) -> (Matrix, Vec<f64>) {
    let d = z.first().map_or(0, Vec::len);
    let n = z.len() as f64;
    let mut sigma = vec![vec![0.0; d + 1]; d + 1];
    let mut gamma = vec![0.0; d + 1];
    for ((zi, &yi), &w) in z.iter().zip(y).zip(pi) {
        let row: Vec<f64> = std::iter::once(1.0).chain(zi.iter().map(|&v| v as f64)).collect();
        for a in 0..=d {
            gamma[a] += w * yi * row[a];
            for b in 0..=d {
                sigma[a][b] += w * row[a] * row[b];
            }
        }
    }
    sigma.iter_mut().flatten().for_each(|v| *v /= n);
    gamma.iter_mut().for_each(|v| *v /= n);
    (sigma, gamma)
}

/// Monte-Carlo estimate of how fast Σ̂_n and Γ̂_n concentrate.
pub fn concentration_probe(config: &ExperimentConfig, ns: &[usize], trials: usize) -> Result<ConcentrationReport> {
    if ns.is_empty() || ns.windows(2).any(|w| w[1] <= w[0]) || trials == 0 {
        return Err(Error::Config("probe needs strictly increasing sample sizes and at least one trial".into()));
    }
    let prep = config.prepare()?;
    let s = Setting::default_weights(&prep.grid, &prep.b_star, prep.nu, crate::numerics::DEFAULT_TOL)?;
    let method = if prep.model.product_terms().is_some() {
        Method::Quadrature
    } else {
        Method::MonteCarlo { n: 1_000_000, seed: repetition_seed(config.seed, u64::MAX) }
    };
    let system = limit_system(&prep.model, &s, method)?;
    let mut levels = Vec::with_capacity(ns.len());
    for &n in ns {
        let errs = (0..trials)
            .into_par_iter()
            .map(|t| {
                let seed = repetition_seed(repetition_seed(config.seed, n as u64), t as u64);
                let batch = sample_batch(&prep.grid, &prep.b_star, n, seed)?;
                let y: Vec<f64> = batch.x.iter().map(|x| prep.model.evaluate(x)).collect();
                let pi = weights_default(&batch.z, prep.nu)?;
                let (sig, gam) = empirical_system(&batch.z, &y, &pi.pi);
                let in_unit = sig.iter().flatten().all(|v| (0.0..=1.0).contains(v));
                let diff: Matrix = sig.iter().zip(&system.sigma).map(|(a, b)| a.iter().zip(b).map(|(u, v)| u - v).collect()).collect();
                let g = gam.iter().zip(&system.gamma).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                Ok((symmetric_spectral_norm(&diff), g, in_unit))
            })
            .collect::<Result<Vec<_>>>()?;
        let sigma_errors: Vec<f64> = errs.iter().map(|e| e.0).collect();
        let gamma_errors: Vec<f64> = errs.iter().map(|e| e.1).collect();
        levels.push(ProbeLevel {
            n,
            sigma_median: median(&sigma_errors),
            gamma_median: median(&gamma_errors),
            sigma_entries_in_unit: errs.iter().all(|e| e.2),
            sigma_errors,
            gamma_errors,
        });
    }
    let ratio = |f: fn(&ProbeLevel) -> f64| levels.windows(2).map(|w| f(&w[0]) / f(&w[1])).collect::<Vec<_>>();
    let sigma_ratios = ratio(|l| l.sigma_median);
    let gamma_ratios = ratio(|l| l.gamma_median);
    Ok(ConcentrationReport { levels, sigma_ratios, gamma_ratios })
}
