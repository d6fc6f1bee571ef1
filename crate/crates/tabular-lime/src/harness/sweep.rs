use super::config::{ExperimentConfig, NuSpec};
use super::experiment::{run_experiment_with, ExperimentReport, TolerancePolicy};
use crate::error::{Error, Result};
use crate::surrogate::Explanation;
use crate::theory::{large_bandwidth_limit, Method};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BandwidthSweep {
    pub nus: Vec<f64>,
    /// One report per entry of `nus`, in the same order.
    pub reports: Vec<ExperimentReport>,
    /// The ν → ∞ limit explanation.
    pub limit: Explanation,
    /// Per coefficient (intercept first): whether the theory value changes
    /// sign somewhere along the sweep.
    pub sign_changes: Vec<bool>,
}

impl BandwidthSweep {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(ExperimentReport::all_pass)
    }

    /// Columns: nu, feature_index, beta_hat_mean, beta_hat_se, beta_theory,
    /// pass. The limit rows carry nu = inf and empty empirical fields.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["nu", "feature_index", "beta_hat_mean", "beta_hat_se", "beta_theory", "pass"])?;
        for (nu, r) in self.nus.iter().zip(&self.reports) {
            for s in &r.summary {
                out.write_record([
                    nu.to_string(),
                    s.feature_index.to_string(),
                    s.beta_hat_mean.to_string(),
                    s.beta_hat_se.to_string(),
                    s.beta_theory.to_string(),
                    s.pass.to_string(),
                ])?;
            }
        }
        for (k, v) in self.limit.as_vector().iter().enumerate() {
            out.write_record(["inf".to_string(), k.to_string(), String::new(), String::new(), v.to_string(), String::new()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Indices whose values take both strictly positive and strictly negative
/// signs across the rows.
pub fn sign_changes(rows: &[Vec<f64>]) -> Vec<bool> {
    let k = rows.first().map_or(0, Vec::len);
    (0..k).map(|c| rows.iter().any(|r| r[c] > 0.0) && rows.iter().any(|r| r[c] < 0.0)).collect()
}

/// Run the experiment once per bandwidth.
pub fn sweep_bandwidth(config: &ExperimentConfig, nus: &[f64]) -> Result<BandwidthSweep> {
    if nus.is_empty() || nus.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::Config("sweep needs a non-empty list of positive bandwidths".into()));
    }
    let prep = config.prepare()?;
    let method = if prep.model.product_terms().is_some() {
        Method::Quadrature
    } else {
        Method::MonteCarlo { n: 1_000_000, seed: config.seed }
    };
    let lim = large_bandwidth_limit(&prep.model, &prep.grid, &prep.b_star, method, crate::numerics::DEFAULT_TOL)?;
    let reports = nus
        .par_iter()
        .map(|&nu| {
            let mut c = config.clone();
            c.nu = NuSpec::Value(nu);
            c.outputs = Default::default();
            run_experiment_with(&c, TolerancePolicy::default())
        })
        .collect::<Result<Vec<_>>>()?;
    let theory: Vec<Vec<f64>> = reports.iter().map(|r| r.theory.as_vector()).collect();
    Ok(BandwidthSweep { nus: nus.to_vec(), sign_changes: sign_changes(&theory), reports, limit: lim.limit })
}
