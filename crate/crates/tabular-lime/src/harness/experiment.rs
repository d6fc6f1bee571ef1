use super::config::{ExperimentConfig, Prepared};
use crate::error::{Error, Result};
use crate::grid::{BinGrid, BinIndices};
use crate::models::ModelSpec;
use crate::sampler::{repetition_seed, sample_batch, weights_default};
use crate::surrogate::{fit_surrogate, Explanation};
use crate::theory::{explain, ExplainOptions};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::time::Instant;

/// |mean β̂ − β^f| ≤ k·SE + floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    pub k_se: f64,
    pub floor: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self { k_se: 4.0, floor: 1e-3 }
    }
}

impl TolerancePolicy {
    pub fn passes(&self, mean: f64, se: f64, theory: f64) -> bool {
        (mean - theory).abs() <= self.k_se * se + self.floor
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionResult {
    pub repetition: usize,
    pub seed: u64,
    /// (β̂_0, …, β̂_d), absent when the fit failed.
    pub beta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// One line of the summary CSV; `feature_index` 0 is the intercept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSummary {
    pub feature_index: usize,
    pub bin_lower: Option<f64>,
    pub bin_upper: Option<f64>,
    pub beta_hat_mean: f64,
    pub beta_hat_std: f64,
    pub beta_hat_se: f64,
    pub beta_theory: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub repetitions: Vec<RepetitionResult>,
    pub summary: Vec<CoefficientSummary>,
    pub theory: Explanation,
    pub xi: Vec<f64>,
    pub b_star: BinIndices,
    pub nu: f64,
    pub n: usize,
    pub lambda: f64,
    pub policy: TolerancePolicy,
    pub runtime_secs: f64,
    /// The configuration as given, when it is serializable.
    #[serde(default)]
    pub config: Option<serde_json::Value>,
}

/// Mean, sample std and standard error of each coordinate across rows.
pub fn column_stats(rows: &[Vec<f64>]) -> Vec<(f64, f64, f64)> {
    let k = rows.first().map_or(0, Vec::len);
    let r = rows.len() as f64;
    (0..k)
        .map(|c| {
            let mean = rows.iter().map(|row| row[c]).sum::<f64>() / r;
            let var = if rows.len() > 1 { rows.iter().map(|row| (row[c] - mean).powi(2)).sum::<f64>() / (r - 1.0) } else { 0.0 };
            (mean, var.sqrt(), var.sqrt() / r.sqrt())
        })
        .collect()
}

/// One LIME fit: sample, evaluate, weight, regress.
pub fn lime_once(model: &ModelSpec, grid: &BinGrid, b_star: &BinIndices, n: usize, nu: f64, lambda: f64, seed: u64) -> Result<Explanation> {
    let batch = sample_batch(grid, b_star, n, seed)?;
    let y: Vec<f64> = batch.x.iter().map(|x| model.evaluate(x)).collect();
    let pi = weights_default(&batch.z, nu)?;
    let mut e = fit_surrogate(&batch.z, &y, &pi, lambda)?;
    e.meta.seed = Some(seed);
    e.meta.p = Some(grid.p());
    Ok(e)
}

/// Repeated empirical fits of a prepared experiment, in parallel; the
/// result does not depend on the thread schedule.
pub fn run_repetitions(prep: &Prepared, n: usize, lambda: f64, reps: usize, seed: u64) -> Result<Vec<RepetitionResult>> {
    (0..reps)
        .into_par_iter()
        .map(|r| {
            let s = repetition_seed(seed, r as u64);
            match lime_once(&prep.model, &prep.grid, &prep.b_star, n, prep.nu, lambda, s) {
                Ok(e) => Ok(RepetitionResult { repetition: r, seed: s, beta: Some(e.as_vector()), error: None }),
                Err(e @ Error::RankDeficient { .. }) => {
                    Ok(RepetitionResult { repetition: r, seed: s, beta: None, error: Some(e.to_string()) })
                }
                Err(e) => Err(e),
            }
        })
        .collect()
}

pub(crate) fn summarize(prep: &Prepared, reps: &[RepetitionResult], theory: &Explanation, policy: TolerancePolicy) -> Vec<CoefficientSummary> {
    let ok: Vec<Vec<f64>> = reps.iter().filter_map(|r| r.beta.clone()).collect();
    let d = prep.grid.d();
    let stats = if ok.is_empty() { vec![(f64::NAN, f64::NAN, f64::NAN); d + 1] } else { column_stats(&ok) };
    let truth = theory.as_vector();
    (0..=d)
        .map(|k| {
            let (mean, std, se) = stats[k];
            let (bin_lower, bin_upper) = if k == 0 {
                (None, None)
            } else {
                let (lo, hi) = prep.grid.bin_bounds(k - 1, prep.b_star.get(k - 1));
                (Some(lo), Some(hi))
            };
            CoefficientSummary {
                feature_index: k,
                bin_lower,
                bin_upper,
                beta_hat_mean: mean,
                beta_hat_std: std,
                beta_hat_se: se,
                beta_theory: truth[k],
                pass: policy.passes(mean, se, truth[k]),
            }
        })
        .collect()
}

/// Empirical LIME against the limit explanation for one configuration.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    run_experiment_with(config, TolerancePolicy::default())
}

pub fn run_experiment_with(config: &ExperimentConfig, policy: TolerancePolicy) -> Result<ExperimentReport> {
    let start = Instant::now();
    let prep = config.prepare()?;
    let theory = explain(&prep.model, &prep.grid, &prep.b_star, prep.nu, ExplainOptions { mc_seed: config.seed, ..Default::default() })?;
    let repetitions = run_repetitions(&prep, config.n, config.lambda, config.repetitions, config.seed)?;
    let summary = summarize(&prep, &repetitions, &theory, policy);
    let report = ExperimentReport {
        repetitions,
        summary,
        theory,
        xi: prep.xi.clone(),
        b_star: prep.b_star.clone(),
        nu: prep.nu,
        n: config.n,
        lambda: config.lambda,
        policy,
        runtime_secs: start.elapsed().as_secs_f64(),
        config: serde_json::to_value(config).ok(),
    };
    report.write_outputs(config)?;
    Ok(report)
}

impl ExperimentReport {
    /// All coefficients within tolerance and at least one successful fit.
    pub fn all_pass(&self) -> bool {
        self.repetitions.iter().any(|r| r.beta.is_some()) && self.summary.iter().all(|s| s.pass)
    }

    pub fn failed_repetitions(&self) -> usize {
        self.repetitions.iter().filter(|r| r.beta.is_none()).count()
    }

    /// Mean β̂ as (β_0, …, β_d).
    pub fn mean_vector(&self) -> Vec<f64> {
        self.summary.iter().map(|s| s.beta_hat_mean).collect()
    }

    pub fn se_vector(&self) -> Vec<f64> {
        self.summary.iter().map(|s| s.beta_hat_se).collect()
    }

    /// Columns: feature_index, bin_lower, bin_upper, beta_hat_mean,
    /// beta_hat_std, beta_hat_se, beta_theory, pass.
    pub fn write_summary_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for s in &self.summary {
            out.serialize(s)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Columns: repetition, seed, status, beta_0, …, beta_d.
    pub fn write_repetitions_csv<W: Write>(&self, w: W) -> Result<()> {
        let d = self.summary.len();
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["repetition".to_string(), "seed".into(), "status".into()];
        header.extend((0..d).map(|k| format!("beta_{k}")));
        out.write_record(&header)?;
        for r in &self.repetitions {
            let mut rec = vec![r.repetition.to_string(), r.seed.to_string()];
            match &r.beta {
                Some(b) => {
                    rec.push("ok".into());
                    rec.extend(b.iter().map(|v| v.to_string()));
                }
                None => {
                    rec.push("rank_deficient".into());
                    rec.extend(std::iter::repeat_n(String::new(), d));
                }
            }
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    fn write_outputs(&self, config: &ExperimentConfig) -> Result<()> {
        let o = &config.outputs;
        if let Some(p) = &o.summary_csv {
            self.write_summary_csv(std::fs::File::create(config.output_path(p))?)?;
        }
        if let Some(p) = &o.repetitions_csv {
            self.write_repetitions_csv(std::fs::File::create(config.output_path(p))?)?;
        }
        if let Some(p) = &o.report_json {
            std::fs::write(config.output_path(p), serde_json::to_string_pretty(self)?)?;
        }
        Ok(())
    }
}

/// Re-derive every verdict of a summary CSV from its numeric columns.
/// Returns the number of rows whose stored verdict disagrees.
pub fn recheck_summary_csv<R: Read>(r: R, policy: TolerancePolicy) -> Result<usize> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut mismatches = 0;
    for row in rdr.deserialize() {
        let s: CoefficientSummary = row?;
        if policy.passes(s.beta_hat_mean, s.beta_hat_se, s.beta_theory) != s.pass {
            mismatches += 1;
        }
    }
    Ok(mismatches)
}
