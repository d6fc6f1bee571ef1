//! The limiting normal equations Σβ = Γ and their solution.

use super::ecoef::{Normalizers, Setting};
use crate::error::{Error, Result};
use crate::models::{ModelSpec, ProductTerm};
use crate::numerics::linalg::{matvec, Matrix};
use crate::sampler::sample_batch;
use crate::surrogate::Explanation;
use serde::{Deserialize, Serialize};

/// How Γ is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Exact separable reduction; needs a structured model.
    Quadrature,
    /// Average over `n` perturbed samples drawn with `seed`.
    MonteCarlo { n: usize, seed: u64 },
}

/// Σ, its inverse and Γ, indexed (0, 1, …, d).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitSystem {
    pub sigma: Matrix,
    pub sigma_inv: Matrix,
    pub gamma: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_se: Option<Vec<f64>>,
}

impl LimitSystem {
    pub fn beta(&self) -> Vec<f64> {
        matvec(&self.sigma_inv, &self.gamma)
    }
}

/// Σ = C·M with M_00 = 1, M_0j = M_jj = α_j, M_jk = α_j α_k.
pub fn sigma_matrix(n: &Normalizers) -> Matrix {
    let d = n.c.len();
    let alpha: Vec<f64> = (0..d).map(|j| n.alpha(j)).collect();
    let mut m = vec![vec![0.0; d + 1]; d + 1];
    m[0][0] = n.big_c;
    for j in 0..d {
        m[0][j + 1] = n.big_c * alpha[j];
        m[j + 1][0] = m[0][j + 1];
        for k in 0..d {
            m[j + 1][k + 1] = n.big_c * if j == k { alpha[j] } else { alpha[j] * alpha[k] };
        }
    }
    m
}

/// Closed-form Σ⁻¹.
pub fn sigma_inverse(n: &Normalizers) -> Matrix {
    let d = n.c.len();
    let p = n.p as f64;
    let inv_c = 1.0 / n.big_c;
    let mut m = vec![vec![0.0; d + 1]; d + 1];
    // α/(1−α) = e⋆/gap and 1/(1−α) = p c/gap
    m[0][0] = inv_c * (1.0 + (0..d).map(|j| n.e_star[j] / n.gap[j]).sum::<f64>());
    for j in 0..d {
        let pc = p * n.c[j];
        m[0][j + 1] = -inv_c * pc / n.gap[j];
        m[j + 1][0] = m[0][j + 1];
        m[j + 1][j + 1] = inv_c * pc * pc / (n.e_star[j] * n.gap[j]);
    }
    m
}

/// Γ = (E[π f], E[π z_1 f], …) for a sum of product terms.
pub fn gamma_structured(terms: &[ProductTerm], s: &Setting, n: &Normalizers) -> Result<Vec<f64>> {
    let (d, p) = (s.d(), s.p() as f64);
    let mut gamma = vec![0.0; d + 1];
    for term in terms {
        // (c_k^g, e^g_{k,b⋆}) for every coordinate
        let mut cg: Vec<f64> = n.c.clone();
        let mut eg: Vec<f64> = n.e_star.clone();
        for (k, g) in &term.factors {
            debug_assert!(term.factors.iter().filter(|(i, _)| i == k).count() == 1);
            if *k >= d {
                return Err(Error::DimensionMismatch { expected: d, found: k + 1 });
            }
            let e = s.e_vector(*k, g)?;
            cg[*k] = e.iter().sum::<f64>() / p;
            eg[*k] = e[s.b_star.get(*k)];
        }
        gamma[0] += term.weight * cg.iter().product::<f64>();
        for j in 0..d {
            let others: f64 = (0..d).filter(|&k| k != j).map(|k| cg[k]).product();
            gamma[j + 1] += term.weight * others * eg[j] / p;
        }
    }
    Ok(gamma)
}

/// Γ and its standard errors from `n` weighted perturbations.
pub fn gamma_monte_carlo(model: &ModelSpec, s: &Setting, n: usize, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = s.d();
    let batch = sample_batch(s.grid, &s.b_star, n, seed)?;
    let pi = s.scheme.batch_weights(&batch)?;
    let mut acc = vec![Welford::default(); d + 1];
    for i in 0..n {
        let v = pi[i] * model.evaluate(&batch.x[i]);
        acc[0].push(v);
        for j in 0..d {
            acc[j + 1].push(if batch.z[i][j] != 0 { v } else { 0.0 });
        }
    }
    Ok((acc.iter().map(|a| a.mean).collect(), acc.iter().map(Welford::se).collect()))
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Welford {
    n: usize,
    pub(crate) mean: f64,
    m2: f64,
}

impl Welford {
    pub(crate) fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub(crate) fn std(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).sqrt()
        }
    }

    pub(crate) fn se(&self) -> f64 {
        self.std() / (self.n.max(1) as f64).sqrt()
    }
}

fn check_dims(model: &ModelSpec, s: &Setting) -> Result<()> {
    model.validate()?;
    if model.dim() != s.d() {
        return Err(Error::DimensionMismatch { expected: s.d(), found: model.dim() });
    }
    Ok(())
}

/// Build Σ, Σ⁻¹ and Γ for a model.
pub fn limit_system(model: &ModelSpec, s: &Setting, method: Method) -> Result<LimitSystem> {
    check_dims(model, s)?;
    let n = s.normalizers()?;
    let (gamma, gamma_se) = match (method, model.product_terms()) {
        (Method::Quadrature, Some(terms)) => (gamma_structured(&terms, s, &n)?, None),
        (Method::Quadrature, None) => {
            return Err(Error::InvalidParameter("quadrature needs a structured model; use Monte Carlo".into()))
        }
        (Method::MonteCarlo { n: draws, seed }, _) => {
            let (g, se) = gamma_monte_carlo(model, s, draws, seed)?;
            (g, Some(se))
        }
    };
    Ok(LimitSystem { sigma: sigma_matrix(&n), sigma_inv: sigma_inverse(&n), gamma, gamma_se })
}

/// Multipliers of the explicit solution: β_j = C⁻¹(a_j Γ_0 + b_j Γ_j) and
/// β_0 = C⁻¹(a_0 Γ_0 − Σ_j q_j Γ_j).
struct SolutionCoefficients {
    inv_c: f64,
    a0: f64,
    q: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl SolutionCoefficients {
    fn new(n: &Normalizers) -> Self {
        let d = n.c.len();
        let p = n.p as f64;
        let mut out = Self { inv_c: 1.0 / n.big_c, a0: 1.0, q: vec![], a: vec![], b: vec![] };
        for j in 0..d {
            let pc = p * n.c[j];
            out.a0 += n.e_star[j] / n.gap[j];
            out.q.push(pc / n.gap[j]);
            out.a.push(-pc / n.gap[j]);
            out.b.push(pc * pc / (n.e_star[j] * n.gap[j]));
        }
        out
    }

    fn apply(&self, gamma: &[f64]) -> Vec<f64> {
        let d = self.a.len();
        let mut beta = Vec::with_capacity(d + 1);
        beta.push(self.inv_c * (self.a0 * gamma[0] - (0..d).map(|j| self.q[j] * gamma[j + 1]).sum::<f64>()));
        beta.extend((0..d).map(|j| self.inv_c * (self.a[j] * gamma[0] + self.b[j] * gamma[j + 1])));
        beta
    }
}

/// Limiting explanation of any bounded model.
///
/// Structured models are reduced exactly to one-dimensional integrals with
/// `Method::Quadrature`. Under `Method::MonteCarlo` the coefficients are
/// averages of a per-draw quantity and come with standard errors.
pub fn beta_general_with(model: &ModelSpec, s: &Setting, method: Method) -> Result<Explanation> {
    check_dims(model, s)?;
    let n = s.normalizers()?;
    let coef = SolutionCoefficients::new(&n);
    let (beta, se) = match method {
        Method::Quadrature => {
            let terms = model.product_terms().ok_or_else(|| {
                Error::InvalidParameter("quadrature needs a structured model; use Monte Carlo".into())
            })?;
            (coef.apply(&gamma_structured(&terms, s, &n)?), None)
        }
        Method::MonteCarlo { n: draws, seed } => {
            let d = s.d();
            let batch = sample_batch(s.grid, &s.b_star, draws, seed)?;
            let pi = s.scheme.batch_weights(&batch)?;
            let mut acc = vec![Welford::default(); d + 1];
            let mut g = vec![0.0; d + 1];
            for i in 0..draws {
                let v = pi[i] * model.evaluate(&batch.x[i]);
                g[0] = v;
                for j in 0..d {
                    g[j + 1] = if batch.z[i][j] != 0 { v } else { 0.0 };
                }
                for (a, b) in acc.iter_mut().zip(coef.apply(&g)) {
                    a.push(b);
                }
            }
            (acc.iter().map(|a| a.mean).collect(), Some(acc.iter().map(Welford::se).collect()))
        }
    };
    let mut e = Explanation::theoretical(beta[0], beta[1..].to_vec())?;
    e.meta.nu = s.scheme.nu();
    e.meta.p = Some(s.p());
    e.meta.tolerance = matches!(method, Method::Quadrature).then_some(s.tol);
    if let Method::MonteCarlo { n, seed } = method {
        e.meta.n = Some(n);
        e.meta.seed = Some(seed);
    }
    e.std_errors = se;
    Ok(e)
}
