//! Weighted per-bin expectations e^ψ_{j,b} and the normalizers built on them.

use super::c_const;
use crate::error::{Error, Result};
use crate::grid::{BinGrid, BinIndices};
use crate::models::UnaryFn;
use crate::numerics::conditional_expect_with_breaks;
use crate::sampler::{weights_default, weights_general, PerturbationBatch};
use serde::{Deserialize, Serialize};

/// How perturbed samples are weighted.
#[derive(Debug, Clone)]
pub enum WeightScheme {
    /// exp(−#mismatched bins/(2ν²)).
    Default { nu: f64 },
    /// exp(−Σ_j (τ_j(ξ_j) − τ_j(x_j))²/(2ν²)).
    General { nu: f64, tau: Vec<UnaryFn>, xi: Vec<f64> },
    /// Every sample weighs 1 (the ν → ∞ limit).
    Flat,
}

impl WeightScheme {
    pub fn nu(&self) -> Option<f64> {
        match self {
            WeightScheme::Default { nu } | WeightScheme::General { nu, .. } => Some(*nu),
            WeightScheme::Flat => None,
        }
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        if let Some(nu) = self.nu() {
            if !(nu > 0.0 && nu.is_finite()) {
                return Err(Error::InvalidParameter(format!("bandwidth ν = {nu} must be positive and finite")));
            }
        }
        if let WeightScheme::General { tau, xi, .. } = self {
            if tau.len() != d || xi.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: tau.len().min(xi.len()) });
            }
        }
        Ok(())
    }

    /// Per-sample weights of a batch under this scheme.
    pub fn batch_weights(&self, batch: &PerturbationBatch) -> Result<Vec<f64>> {
        Ok(match self {
            WeightScheme::Default { nu } => weights_default(&batch.z, *nu)?.pi,
            WeightScheme::General { nu, tau, xi } => weights_general(&batch.x, xi, tau, *nu)?.pi,
            WeightScheme::Flat => vec![1.0; batch.n()],
        })
    }
}

/// Everything the closed forms need about the problem instance.
#[derive(Debug, Clone)]
pub struct Setting<'a> {
    pub grid: &'a BinGrid,
    pub b_star: BinIndices,
    pub scheme: WeightScheme,
    pub tol: f64,
}

impl<'a> Setting<'a> {
    pub fn new(grid: &'a BinGrid, b_star: BinIndices, scheme: WeightScheme, tol: f64) -> Result<Self> {
        if b_star.len() != grid.d() {
            return Err(Error::DimensionMismatch { expected: grid.d(), found: b_star.len() });
        }
        if b_star.0.iter().any(|&b| b >= grid.p()) {
            return Err(Error::InvalidParameter("bin index out of range".into()));
        }
        scheme.validate(grid.d())?;
        if let WeightScheme::General { xi, .. } = &scheme {
            if grid.bin_id(xi)? != b_star {
                return Err(Error::InvalidParameter("ξ does not lie in the bins b⋆".into()));
            }
        }
        Ok(Self { grid, b_star, scheme, tol })
    }

    pub fn default_weights(grid: &'a BinGrid, b_star: &BinIndices, nu: f64, tol: f64) -> Result<Self> {
        Self::new(grid, b_star.clone(), WeightScheme::Default { nu }, tol)
    }

    /// General weights around ξ.
    pub fn general_weights(grid: &'a BinGrid, xi: &[f64], tau: Vec<UnaryFn>, nu: f64, tol: f64) -> Result<Self> {
        let b_star = grid.bin_id(xi)?;
        Self::new(grid, b_star, WeightScheme::General { nu, tau, xi: xi.to_vec() }, tol)
    }

    pub fn d(&self) -> usize {
        self.grid.d()
    }

    pub fn p(&self) -> usize {
        self.grid.p()
    }

    /// exp(−1/(2ν²)) for the default scheme, 1 for the flat one.
    fn off_bin_factor(&self) -> f64 {
        match &self.scheme {
            WeightScheme::Default { nu } => (-1.0 / (2.0 * nu * nu)).exp(),
            _ => 1.0,
        }
    }

    /// e^ψ_{j,b} for b = 0..p.
    pub fn e_vector(&self, j: usize, psi: &UnaryFn) -> Result<Vec<f64>> {
        let p = self.p();
        let b_star = self.b_star.get(j);
        let mut out = Vec::with_capacity(p);
        match &self.scheme {
            WeightScheme::Default { .. } | WeightScheme::Flat => {
                let off = self.off_bin_factor();
                for b in 0..p {
                    let w = if b == b_star { 1.0 } else { off };
                    let m = match psi.constant_value() {
                        Some(k) => k,
                        None => {
                            let law = self.grid.trunc_params(j, b)?;
                            conditional_expect_with_breaks(|x| psi.eval(x), &law, &psi.breaks(), self.tol)?
                        }
                    };
                    out.push(w * m);
                }
            }
            WeightScheme::General { nu, tau, xi } => {
                let tau_j = &tau[j];
                let anchor = tau_j.eval(xi[j]);
                let scale = 1.0 / (2.0 * nu * nu);
                let mut breaks = psi.breaks();
                breaks.extend(tau_j.breaks());
                for b in 0..p {
                    let law = self.grid.trunc_params(j, b)?;
                    let f = |x: f64| psi.eval(x) * (-(anchor - tau_j.eval(x)).powi(2) * scale).exp();
                    out.push(conditional_expect_with_breaks(f, &law, &breaks, self.tol)?);
                }
            }
        }
        Ok(out)
    }

    /// Normalizers of ψ = 1.
    pub fn normalizers(&self) -> Result<Normalizers> {
        let (d, p) = (self.d(), self.p());
        match &self.scheme {
            WeightScheme::Default { nu } => {
                let off = self.off_bin_factor();
                let c = c_const(p, *nu);
                Ok(Normalizers {
                    p,
                    e_star: vec![1.0; d],
                    c: vec![c; d],
                    gap: vec![(p - 1) as f64 * off; d],
                    big_c: c.powi(d as i32),
                })
            }
            WeightScheme::Flat => Ok(Normalizers {
                p,
                e_star: vec![1.0; d],
                c: vec![1.0; d],
                gap: vec![(p - 1) as f64; d],
                big_c: 1.0,
            }),
            WeightScheme::General { .. } => {
                let one = UnaryFn::Constant { value: 1.0 };
                let mut n = Normalizers { p, e_star: vec![], c: vec![], gap: vec![], big_c: 1.0 };
                for j in 0..d {
                    let e = self.e_vector(j, &one)?;
                    let bs = self.b_star.get(j);
                    n.e_star.push(e[bs]);
                    n.gap.push(e.iter().enumerate().filter(|&(b, _)| b != bs).map(|(_, v)| v).sum());
                    let cj = e.iter().sum::<f64>() / p as f64;
                    n.c.push(cj);
                    n.big_c *= cj;
                }
                Ok(n)
            }
        }
    }
}

/// e_{j,b⋆_j}, c_j, p·c_j − e_{j,b⋆_j} and C = ∏ c_j for ψ = 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizers {
    pub p: usize,
    pub e_star: Vec<f64>,
    pub c: Vec<f64>,
    /// Σ_{b≠b⋆_j} e_{j,b}, equal to p·c_j − e_{j,b⋆_j}.
    pub gap: Vec<f64>,
    pub big_c: f64,
}

impl Normalizers {
    /// α_j = e_{j,b⋆_j}/(p c_j).
    pub fn alpha(&self, j: usize) -> f64 {
        self.e_star[j] / (self.p as f64 * self.c[j])
    }
}

/// Table of e^ψ_{j,b} with its averages c_j^ψ, plus c and C when ψ = 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ECoefficients {
    pub e: Vec<Vec<f64>>,
    pub c_psi: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub big_c: Option<f64>,
}

impl ECoefficients {
    pub fn from_table(e: Vec<Vec<f64>>) -> Self {
        let c_psi = e.iter().map(|row| row.iter().sum::<f64>() / row.len() as f64).collect();
        Self { e, c_psi, c: None, big_c: None }
    }
}

/// e^ψ_{j,b} under default weights, one map ψ_j per feature.
pub fn e_coefficients(psi: &[UnaryFn], grid: &BinGrid, b_star: &BinIndices, nu: f64, tol: f64) -> Result<ECoefficients> {
    let s = Setting::default_weights(grid, b_star, nu, tol)?;
    e_coefficients_with(psi, &s)
}

/// e^ψ_{j,b} under any weighting scheme.
pub fn e_coefficients_with(psi: &[UnaryFn], s: &Setting) -> Result<ECoefficients> {
    if psi.len() != s.d() {
        return Err(Error::DimensionMismatch { expected: s.d(), found: psi.len() });
    }
    let table = (0..s.d()).map(|j| s.e_vector(j, &psi[j])).collect::<Result<Vec<_>>>()?;
    let mut out = ECoefficients::from_table(table);
    if psi.iter().all(|f| f.constant_value() == Some(1.0)) {
        let n = s.normalizers()?;
        out.c = matches!(s.scheme, WeightScheme::Default { .. } | WeightScheme::Flat).then(|| n.c[0]);
        out.big_c = Some(n.big_c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::fit_grid;

    fn grid() -> BinGrid {
        let train: Vec<Vec<f64>> = (0..300).map(|i| vec![(i as f64 * 0.7548).fract() * 4.0, ((i * i) as f64 * 0.1).sin()]).collect();
        fit_grid(&train, 4).unwrap()
    }

    #[test]
    fn unit_psi_under_default_weights() {
        let g = grid();
        let b = BinIndices(vec![1, 3]);
        let nu: f64 = 1.3;
        let e = e_coefficients(&vec![UnaryFn::Constant { value: 1.0 }; 2], &g, &b, nu, 1e-10).unwrap();
        let off = (-1.0 / (2.0 * nu * nu)).exp();
        for j in 0..2 {
            for bin in 0..4 {
                let want = if bin == b.get(j) { 1.0 } else { off };
                assert_eq!(e.e[j][bin], want);
            }
        }
        let c = e.c.unwrap();
        assert!(c > 0.25 && c <= 1.0);
        assert!((e.big_c.unwrap() - c * c).abs() < 1e-15);
    }

    #[test]
    fn identity_psi_gives_truncated_means() {
        let g = grid();
        let b = BinIndices(vec![2, 0]);
        let nu: f64 = 0.9;
        let off = (-1.0 / (2.0 * nu * nu)).exp();
        let e = e_coefficients(&vec![UnaryFn::identity(); 2], &g, &b, nu, 1e-12).unwrap();
        for j in 0..2 {
            for bin in 0..4 {
                let (m, _) = g.trunc_params(j, bin).unwrap().stats().unwrap();
                let w = if bin == b.get(j) { 1.0 } else { off };
                assert!((e.e[j][bin] - w * m).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn bin_indicator_vanishes_elsewhere() {
        let g = grid();
        let (lo, hi) = g.bin_bounds(0, 2);
        let psi = vec![UnaryFn::Indicator { lo, hi }, UnaryFn::Constant { value: 1.0 }];
        let e = e_coefficients(&psi, &g, &BinIndices(vec![0, 0]), 1.0, 1e-12).unwrap();
        for bin in [0, 1, 3] {
            assert!(e.e[0][bin].abs() < 1e-12);
        }
        assert!(e.e[0][2] > 0.0);
    }

    #[test]
    fn bin_indicator_tau_reproduces_default() {
        let g = grid();
        let xi = vec![g.bin_center(0, 1), g.bin_center(1, 2)];
        let b = g.bin_id(&xi).unwrap();
        let tau: Vec<UnaryFn> = (0..2)
            .map(|j| {
                let (lo, hi) = g.bin_bounds(j, b.get(j));
                UnaryFn::Indicator { lo, hi }
            })
            .collect();
        let general = Setting::general_weights(&g, &xi, tau, 0.8, 1e-12).unwrap().normalizers().unwrap();
        let default = Setting::default_weights(&g, &b, 0.8, 1e-12).unwrap().normalizers().unwrap();
        for j in 0..2 {
            assert!((general.e_star[j] - 1.0).abs() < 1e-11);
            assert!((general.c[j] - default.c[j]).abs() < 1e-11);
            assert!((general.gap[j] - default.gap[j]).abs() < 1e-11);
        }
        assert!((general.big_c - default.big_c).abs() < 1e-11);
    }

    #[test]
    fn xi_outside_its_bins_rejected() {
        let g = grid();
        let tau = vec![UnaryFn::Constant { value: 0.0 }; 2];
        let s = Setting::new(&g, BinIndices(vec![0, 0]), WeightScheme::General { nu: 1.0, tau, xi: vec![g.bin_center(0, 3), g.bin_center(1, 0)] }, 1e-10);
        assert!(s.is_err());
    }
}
