//! Weighted ridge regression on the binary interpretable features.

use crate::error::{Error, Result};
use crate::numerics::linalg::{Cholesky, Matrix};
use crate::sampler::WeightVector;
use serde::{Deserialize, Serialize};

/// Pivots below this fraction of the largest diagonal entry mark the
/// normal system as singular.
const PIVOT_FLOOR: f64 = 1e-10;
const JITTER: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExplanationKind {
    Empirical,
    Theoretical,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExplanationMeta {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Intercept β_0 and interpretable coefficients β_1..β_d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub kind: ExplanationKind,
    #[serde(default)]
    pub meta: ExplanationMeta,
    /// Monte-Carlo standard errors of (β_0, β_1, …), when estimated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_errors: Option<Vec<f64>>,
}

impl Explanation {
    pub fn theoretical(intercept: f64, coefficients: Vec<f64>) -> Result<Self> {
        let e = Self {
            intercept,
            coefficients,
            kind: ExplanationKind::Theoretical,
            meta: ExplanationMeta::default(),
            std_errors: None,
        };
        e.check_finite()?;
        Ok(e)
    }

    pub fn d(&self) -> usize {
        self.coefficients.len()
    }

    /// (β_0, β_1, …, β_d).
    pub fn as_vector(&self) -> Vec<f64> {
        std::iter::once(self.intercept).chain(self.coefficients.iter().copied()).collect()
    }

    pub fn from_vector(v: &[f64], kind: ExplanationKind) -> Self {
        Self {
            intercept: v[0],
            coefficients: v[1..].to_vec(),
            kind,
            meta: ExplanationMeta::default(),
            std_errors: None,
        }
    }

    /// Largest coordinate-wise gap to another explanation, intercept included.
    pub fn max_abs_diff(&self, other: &Explanation) -> f64 {
        self.as_vector().iter().zip(other.as_vector()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Euclidean norm of the interpretable coefficients.
    pub fn coefficient_norm(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    fn check_finite(&self) -> Result<()> {
        if self.as_vector().iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite("explanation coefficients".into()))
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Minimize Σ_i π_i (y_i − β_0 − β·z_i)² + λ‖β_{1..d}‖².
pub fn fit_surrogate(z: &[Vec<u8>], y: &[f64], pi: &WeightVector, lambda: f64) -> Result<Explanation> {
    let n = z.len();
    if y.len() != n || pi.pi.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: y.len().min(pi.pi.len()) });
    }
    if !(lambda >= 0.0) {
        return Err(Error::InvalidParameter(format!("ridge penalty λ = {lambda} must be non-negative")));
    }
    let d = z.first().map_or(0, Vec::len);
    if n <= d + 1 {
        return Err(Error::InvalidParameter(format!("need n > d + 1 samples, got n = {n}, d = {d}")));
    }
    let k = d + 1;
    let mut gram: Matrix = vec![vec![0.0; k]; k];
    let mut rhs = vec![0.0; k];
    let mut active = Vec::with_capacity(k);
    for i in 0..n {
        let w = pi.pi[i];
        active.clear();
        active.push(0);
        active.extend((0..d).filter(|&j| z[i][j] != 0).map(|j| j + 1));
        for (ai, &a) in active.iter().enumerate() {
            rhs[a] += w * y[i];
            for &b in &active[ai..] {
                gram[a][b] += w;
            }
        }
    }
    for a in 0..k {
        for b in 0..a {
            gram[a][b] = gram[b][a];
        }
    }
    for j in 1..k {
        gram[j][j] += lambda;
    }
    let chol = match Cholesky::new(&gram, PIVOT_FLOOR) {
        Ok(c) => c,
        Err(first) if lambda == 0.0 => {
            let scale = (0..k).map(|i| gram[i][i]).fold(0.0, f64::max);
            for (i, row) in gram.iter_mut().enumerate() {
                row[i] += JITTER * scale;
            }
            Cholesky::new(&gram, PIVOT_FLOOR).map_err(|_| first)?
        }
        Err(e) => return Err(e),
    };
    let beta = chol.solve(&rhs);
    let mut e = Explanation::from_vector(&beta, ExplanationKind::Empirical);
    e.meta = ExplanationMeta { n: Some(n), nu: Some(pi.nu), lambda: Some(lambda), ..Default::default() };
    e.check_finite()?;
    Ok(e)
}
