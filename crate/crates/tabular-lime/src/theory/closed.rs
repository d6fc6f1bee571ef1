//! Closed-form explanations for structured model families under default
//! weights.

use super::c_const;
use super::ecoef::{ECoefficients, Setting, WeightScheme};
use super::system::{beta_general_with, Method, Welford};
use crate::error::{Error, Result};
use crate::grid::{BinGrid, BinIndices};
use crate::models::{refine_partition, Cell, KernelTerm, ModelSpec, Rectangle, UnaryFn};
use crate::numerics::normal_mass;
use crate::sampler::sample_batch;
use crate::surrogate::Explanation;
use serde::{Deserialize, Serialize};

fn off_bin(nu: f64) -> f64 {
    (-1.0 / (2.0 * nu * nu)).exp()
}

/// p·c and p·c − 1 = (p−1)·exp(−1/(2ν²)).
fn pc_pair(p: usize, nu: f64) -> (f64, f64) {
    (p as f64 * c_const(p, nu), (p - 1) as f64 * off_bin(nu))
}

fn annotate(mut e: Explanation, p: usize, nu: f64) -> Explanation {
    e.meta.p = Some(p);
    e.meta.nu = Some(nu);
    e
}

fn check_bstar(grid: &BinGrid, b_star: &BinIndices, d: usize) -> Result<()> {
    if d != grid.d() || b_star.len() != grid.d() {
        return Err(Error::DimensionMismatch { expected: grid.d(), found: d.min(b_star.len()) });
    }
    if b_star.0.iter().any(|&b| b >= grid.p()) {
        return Err(Error::InvalidParameter("bin index out of range".into()));
    }
    Ok(())
}

/// f(x) = Σ_j f_j(x_j).
pub fn beta_additive(terms: &[UnaryFn], grid: &BinGrid, b_star: &BinIndices, nu: f64, tol: f64) -> Result<Explanation> {
    check_bstar(grid, b_star, terms.len())?;
    let s = Setting::default_weights(grid, b_star, nu, tol)?;
    let p = grid.p();
    let (pc, pcm1) = pc_pair(p, nu);
    let c = pc / p as f64;
    let mut intercept = 0.0;
    let mut coefs = Vec::with_capacity(terms.len());
    for (j, f) in terms.iter().enumerate() {
        let e = s.e_vector(j, f)?;
        let bs = b_star.get(j);
        let cf = e.iter().sum::<f64>() / p as f64;
        coefs.push(pc / pcm1 * (e[bs] - cf / c));
        intercept += e.iter().enumerate().filter(|&(b, _)| b != bs).map(|(_, v)| v).sum::<f64>() / pcm1;
    }
    Ok(annotate(Explanation::theoretical(intercept, coefs)?, p, nu))
}

/// Linear explanation together with the bin-mean contrasts v_j.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearExplanation {
    pub explanation: Explanation,
    /// β_j = λ_j·v_j.
    pub v: Vec<f64>,
}

/// f(x) = λ_0 + Σ_j λ_j x_j.
pub fn beta_linear(intercept: f64, lambdas: &[f64], grid: &BinGrid, b_star: &BinIndices, nu: f64) -> Result<LinearExplanation> {
    check_bstar(grid, b_star, lambdas.len())?;
    let p = grid.p();
    let e = off_bin(nu);
    let (_, pcm1) = pc_pair(p, nu);
    let mut v = Vec::with_capacity(lambdas.len());
    let mut f_at_mean = intercept;
    let mut correction = 0.0;
    for (j, &lam) in lambdas.iter().enumerate() {
        let mu: Vec<f64> = (0..p).map(|b| Ok(grid.trunc_params(j, b)?.stats()?.0)).collect::<Result<_>>()?;
        let bs = b_star.get(j);
        let star = mu[bs];
        v.push(mu.iter().map(|m| star - m).sum::<f64>() / (p - 1) as f64);
        let others: f64 = mu.iter().enumerate().filter(|&(b, _)| b != bs).map(|(_, m)| m).sum();
        let weighted = (star + e * others) / (1.0 + (p - 1) as f64 * e);
        f_at_mean += lam * weighted;
        correction += (star - weighted) * lam;
    }
    let coefs: Vec<f64> = lambdas.iter().zip(&v).map(|(l, vj)| l * vj).collect();
    let explanation = annotate(Explanation::theoretical(f_at_mean - correction / pcm1, coefs)?, p, nu);
    Ok(LinearExplanation { explanation, v })
}

/// Multiplicative formula from a table of weighted e^{f_j}_{j,b}.
pub fn beta_multiplicative_from_e(e: &ECoefficients, b_star: &BinIndices, nu: f64) -> Result<Explanation> {
    let d = e.e.len();
    let p = e.e.first().map_or(0, Vec::len);
    if p < 2 || b_star.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: b_star.len() });
    }
    let (pc, pcm1) = pc_pair(p, nu);
    let c = pc / p as f64;
    for (j, cf) in e.c_psi.iter().enumerate() {
        if *cf == 0.0 {
            return Err(Error::ZeroNormalizer { index: j });
        }
    }
    let scale: f64 = e.c_psi.iter().product::<f64>() / c.powi(d as i32);
    let ratio: Vec<f64> = (0..d).map(|j| e.e[j][b_star.get(j)] * c / e.c_psi[j]).collect();
    let coefs: Vec<f64> = ratio.iter().map(|r| scale * pc / pcm1 * (r - 1.0)).collect();
    let intercept = scale * (1.0 + ratio.iter().map(|r| (1.0 - r) / pcm1).sum::<f64>());
    let out = Explanation::theoretical(intercept, coefs);
    match out {
        Err(Error::NonFinite(_)) => Err(Error::ZeroNormalizer { index: e.c_psi.iter().position(|c| !c.is_normal()).unwrap_or(0) }),
        other => Ok(annotate(other?, p, nu)),
    }
}

/// f(x) = ∏_j f_j(x_j).
pub fn beta_multiplicative(factors: &[UnaryFn], grid: &BinGrid, b_star: &BinIndices, nu: f64, tol: f64) -> Result<Explanation> {
    check_bstar(grid, b_star, factors.len())?;
    let s = Setting::default_weights(grid, b_star, nu, tol)?;
    let table = (0..factors.len()).map(|j| s.e_vector(j, &factors[j])).collect::<Result<Vec<_>>>()?;
    beta_multiplicative_from_e(&ECoefficients::from_table(table), b_star, nu)
}

/// Weighted e-coefficients of x ↦ exp(−‖x − ζ‖²/(2γ²)) from the Gaussian
/// product identity, without quadrature.
pub fn kernel_e_coefficients(zeta: &[f64], gamma: f64, grid: &BinGrid, b_star: &BinIndices, nu: f64) -> Result<ECoefficients> {
    check_bstar(grid, b_star, zeta.len())?;
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!("kernel width {gamma} must be positive")));
    }
    let off = off_bin(nu);
    let g2 = gamma * gamma;
    let mut table = Vec::with_capacity(zeta.len());
    for (j, &z) in zeta.iter().enumerate() {
        let mut row = Vec::with_capacity(grid.p());
        for b in 0..grid.p() {
            let law = grid.trunc_params(j, b)?;
            let (mu, sigma) = (law.mu, law.sigma);
            let s2 = sigma * sigma;
            let m = (g2 * mu + s2 * z) / (g2 + s2);
            let st = (s2 * g2 / (s2 + g2)).sqrt();
            let tilted = normal_mass((law.lo - m) / st, (law.hi - m) / st);
            let e_hat = st / sigma * tilted / law.mass() * (-(mu - z).powi(2) / (2.0 * (g2 + s2))).exp();
            row.push(if b == b_star.get(j) { e_hat } else { off * e_hat });
        }
        table.push(row);
    }
    Ok(ECoefficients::from_table(table))
}

/// Σ_i α_i·k_γ_i(·, ζ_i), one multiplicative explanation per term.
pub fn beta_kernel(terms: &[KernelTerm], grid: &BinGrid, b_star: &BinIndices, nu: f64) -> Result<Explanation> {
    let d = grid.d();
    let off = off_bin(nu);
    let mut acc = vec![0.0; d + 1];
    for t in terms {
        let mut e = kernel_e_coefficients(&t.center, t.gamma, grid, b_star, nu)?;
        for j in (0..d).filter(|&j| !t.is_active(j)) {
            e.e[j] = (0..grid.p()).map(|b| if b == b_star.get(j) { 1.0 } else { off }).collect();
        }
        let e = ECoefficients::from_table(e.e);
        let beta = beta_multiplicative_from_e(&e, b_star, nu)?.as_vector();
        for (a, b) in acc.iter_mut().zip(beta) {
            *a += t.alpha * b;
        }
    }
    Ok(annotate(Explanation::theoretical(acc[0], acc[1..].to_vec())?, grid.p(), nu))
}

/// Truncated-law mass of `rect` relative to its enclosing d-bin.
pub fn relative_importance(rect: &Rectangle, grid: &BinGrid, enclosure: &BinIndices) -> Result<f64> {
    if rect.enclosing_bins(grid)? != *enclosure {
        return Err(Error::ContainmentViolation {
            index: (0..rect.dim()).find(|&j| grid.bin_of(j, 0.5 * (rect.lower[j] + rect.upper[j])) != Some(enclosure.get(j))).unwrap_or(0),
        });
    }
    let mut out = 1.0;
    for j in 0..rect.dim() {
        out *= grid.trunc_params(j, enclosure.get(j))?.interval_mass(rect.lower[j], rect.upper[j]);
    }
    Ok(out)
}

/// Number of coordinates where ξ's bin differs from the enclosing bin.
pub fn bin_distance(b_star: &BinIndices, enclosure: &BinIndices) -> usize {
    b_star.0.iter().zip(&enclosure.0).filter(|(a, b)| a != b).count()
}

/// Per-rectangle pieces of the indicator formula.
struct IndicatorParts {
    coefs: Vec<f64>,
    intercept: f64,
}

fn indicator_parts(rect: &Rectangle, value: f64, grid: &BinGrid, b_star: &BinIndices, nu: f64) -> Result<IndicatorParts> {
    let enclosure = rect.enclosing_bins(grid)?;
    check_bstar(grid, b_star, rect.dim())?;
    let d = rect.dim() as i32;
    let p = grid.p();
    let (pc, _) = pc_pair(p, nu);
    let rel = value * relative_importance(rect, grid, &enclosure)?;
    let dist = bin_distance(b_star, &enclosure) as f64;
    let two_nu2 = 2.0 * nu * nu;
    let base = pc.powi(d - 1);
    let coefs: Vec<f64> = (0..rect.dim())
        .map(|j| {
            if b_star.get(j) == enclosure.get(j) {
                rel * (-dist / two_nu2).exp() / base
            } else {
                -rel * ((1.0 - dist) / two_nu2).exp() / ((p - 1) as f64 * base)
            }
        })
        .collect();
    let intercept = rel * (-dist / two_nu2).exp() / pc.powi(d) - coefs.iter().sum::<f64>() / pc;
    Ok(IndicatorParts { coefs, intercept })
}

/// f = value·1_A for a rectangle A inside one d-bin.
pub fn beta_indicator(rect: &Rectangle, value: f64, grid: &BinGrid, b_star: &BinIndices, nu: f64) -> Result<Explanation> {
    let parts = indicator_parts(rect, value, grid, b_star, nu)?;
    Ok(annotate(Explanation::theoretical(parts.intercept, parts.coefs)?, grid.p(), nu))
}

/// Piecewise-constant model on refined cells.
///
/// β_j is the aligned sum minus the misaligned sum of
/// value·RelImp·exp(−dist/(2ν²)), the latter scaled by exp(1/(2ν²))/(p−1),
/// all over (pc)^{d−1}.
pub fn beta_partition(cells: &[Cell], grid: &BinGrid, b_star: &BinIndices, nu: f64) -> Result<Explanation> {
    let d = grid.d();
    check_bstar(grid, b_star, cells.first().map_or(d, |c| c.rect.dim()))?;
    let p = grid.p();
    let (pc, _) = pc_pair(p, nu);
    let two_nu2 = 2.0 * nu * nu;
    let mut aligned = vec![0.0; d];
    let mut misaligned = vec![0.0; d];
    let mut intercept = 0.0;
    for cell in cells {
        let enclosure = cell.rect.enclosing_bins(grid)?;
        let w = cell.value * relative_importance(&cell.rect, grid, &enclosure)? * (-(bin_distance(b_star, &enclosure) as f64) / two_nu2).exp();
        for j in 0..d {
            if b_star.get(j) == enclosure.get(j) {
                aligned[j] += w;
            } else {
                misaligned[j] += w;
            }
        }
        intercept += indicator_parts(&cell.rect, cell.value, grid, b_star, nu)?.intercept;
    }
    let base = pc.powi(d as i32 - 1);
    let spread = (1.0 / two_nu2).exp() / (p - 1) as f64;
    let coefs = (0..d).map(|j| (aligned[j] - spread * misaligned[j]) / base).collect();
    Ok(annotate(Explanation::theoretical(intercept, coefs)?, p, nu))
}

/// Tolerances and Monte-Carlo budget for [`explain`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExplainOptions {
    pub tol: f64,
    pub mc_draws: usize,
    pub mc_seed: u64,
}

impl Default for ExplainOptions {
    fn default() -> Self {
        Self { tol: crate::numerics::DEFAULT_TOL, mc_draws: 1_000_000, mc_seed: 0 }
    }
}

/// Limit explanation by the specialized formula for the model's family;
/// opaque models fall back to Monte Carlo.
pub fn explain(model: &ModelSpec, grid: &BinGrid, b_star: &BinIndices, nu: f64, opts: ExplainOptions) -> Result<Explanation> {
    model.validate()?;
    check_bstar(grid, b_star, model.dim())?;
    match model {
        ModelSpec::Linear { intercept, coefficients } => Ok(beta_linear(*intercept, coefficients, grid, b_star, nu)?.explanation),
        ModelSpec::Additive { terms } => beta_additive(terms, grid, b_star, nu, opts.tol),
        ModelSpec::Multiplicative { factors } => beta_multiplicative(factors, grid, b_star, nu, opts.tol),
        ModelSpec::IndicatorRect { rect, value } => {
            let cells = refine_partition(&[Cell { rect: rect.clone(), value: *value }], grid)?;
            beta_partition(&cells, grid, b_star, nu)
        }
        ModelSpec::Partition { cells } => beta_partition(&refine_partition(cells, grid)?, grid, b_star, nu),
        ModelSpec::KernelSum { terms } => beta_kernel(terms, grid, b_star, nu),
        ModelSpec::Opaque(_) => {
            let s = Setting::default_weights(grid, b_star, nu, opts.tol)?;
            beta_general_with(model, &s, Method::MonteCarlo { n: opts.mc_draws, seed: opts.mc_seed })
        }
    }
}

/// ν → ∞ limit, in both the regression form and the conditional form
/// (p/(p−1))·(E[f | b_j = b⋆_j] − E[f]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LargeBandwidthLimit {
    pub limit: Explanation,
    pub conditional_form: Vec<f64>,
}

pub fn large_bandwidth_limit(model: &ModelSpec, grid: &BinGrid, b_star: &BinIndices, method: Method, tol: f64) -> Result<LargeBandwidthLimit> {
    let s = Setting::new(grid, b_star.clone(), WeightScheme::Flat, tol)?;
    let limit = beta_general_with(model, &s, method)?;
    let d = grid.d();
    let p = grid.p() as f64;
    let factor = p / (p - 1.0);
    let conditional_form = match method {
        Method::Quadrature => {
            let terms = model.product_terms().ok_or_else(|| Error::InvalidParameter("quadrature needs a structured model".into()))?;
            let mut mean = 0.0;
            let mut cond = vec![0.0; d];
            for term in &terms {
                // unconditional and b⋆-conditional means per coordinate
                let mut m = vec![1.0; d];
                let mut m_star = vec![1.0; d];
                for (k, g) in &term.factors {
                    let e = s.e_vector(*k, g)?;
                    m[*k] = e.iter().sum::<f64>() / p;
                    m_star[*k] = e[b_star.get(*k)];
                }
                mean += term.weight * m.iter().product::<f64>();
                for j in 0..d {
                    cond[j] += term.weight * (0..d).map(|k| if k == j { m_star[k] } else { m[k] }).product::<f64>();
                }
            }
            cond.iter().map(|cj| factor * (cj - mean)).collect()
        }
        Method::MonteCarlo { n, seed } => {
            let batch = sample_batch(grid, b_star, n, seed)?;
            let f: Vec<f64> = batch.x.iter().map(|x| model.evaluate(x)).collect();
            let mut all = Welford::default();
            f.iter().for_each(|&v| all.push(v));
            (0..d)
                .map(|j| {
                    let mut w = Welford::default();
                    (0..n).filter(|&i| batch.z[i][j] != 0).for_each(|i| w.push(f[i]));
                    factor * (w.mean - all.mean)
                })
                .collect()
        }
    };
    Ok(LargeBandwidthLimit { limit, conditional_form })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::fit_grid;
    use crate::numerics::conditional_expect;

    fn grid(d: usize, p: usize) -> BinGrid {
        let train: Vec<Vec<f64>> =
            (0..500).map(|i| (0..d).map(|j| ((i * (2 * j + 5)) as f64 * 0.381966).fract() * 4.0 - 2.0).collect()).collect();
        fit_grid(&train, p).unwrap()
    }

    fn general(model: &ModelSpec, g: &BinGrid, b: &BinIndices, nu: f64) -> Explanation {
        let s = Setting::default_weights(g, b, nu, 1e-12).unwrap();
        beta_general_with(model, &s, Method::Quadrature).unwrap()
    }

    #[test]
    fn c_constant_values() {
        assert!((c_const(4, 1.0) - 0.704_898).abs() < 1e-6);
        assert!((c_const(4, 1e8) - 1.0).abs() < 1e-12);
        assert!((c_const(4, 1e-3) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn additive_constant_term_is_ignored() {
        let g = grid(2, 3);
        let b = BinIndices(vec![0, 2]);
        let terms = vec![UnaryFn::Constant { value: 2.0 }, UnaryFn::Polynomial { coeffs: vec![0.0, 1.0, -0.5] }];
        let e = beta_additive(&terms, &g, &b, 1.1, 1e-12).unwrap();
        assert!(e.coefficients[0].abs() < 1e-14);
    }

    #[test]
    fn additive_matches_general() {
        let g = grid(3, 4);
        let b = BinIndices(vec![1, 3, 0]);
        let terms = vec![
            UnaryFn::Polynomial { coeffs: vec![0.1, -1.0, 0.0, 0.3] },
            UnaryFn::Polynomial { coeffs: vec![0.0, 0.5, 1.2, -0.2] },
            UnaryFn::Polynomial { coeffs: vec![-1.0, 0.0, 0.0, 1.0] },
        ];
        let a = beta_additive(&terms, &g, &b, 0.9, 1e-12).unwrap();
        let gen = general(&ModelSpec::Additive { terms }, &g, &b, 0.9);
        assert!(a.max_abs_diff(&gen) < 1e-8);
    }

    #[test]
    fn linear_two_bins() {
        let g = grid(1, 2);
        let b = BinIndices(vec![0]);
        let lin = beta_linear(0.0, &[2.0], &g, &b, 1.0).unwrap();
        let m0 = g.trunc_params(0, 0).unwrap().stats().unwrap().0;
        let m1 = g.trunc_params(0, 1).unwrap().stats().unwrap().0;
        assert!((lin.explanation.coefficients[0] - 2.0 * (m0 - m1)).abs() < 1e-14);
        assert_eq!(beta_linear(0.0, &[0.0], &g, &b, 1.0).unwrap().explanation.coefficients[0], 0.0);
    }

    #[test]
    fn linear_intercept_has_simple_form() {
        let g = grid(3, 5);
        let b = BinIndices(vec![4, 0, 2]);
        let lam = [1.5, -0.7, 2.0];
        let lin = beta_linear(0.4, &lam, &g, &b, 1.3).unwrap();
        let mut want = 0.4;
        for j in 0..3 {
            let others: f64 = (0..5).filter(|&k| k != b.get(j)).map(|k| g.trunc_params(j, k).unwrap().stats().unwrap().0).sum();
            want += lam[j] * others / 4.0;
        }
        assert!((lin.explanation.intercept - want).abs() < 1e-12);
        let gen = general(&ModelSpec::Linear { intercept: 0.4, coefficients: lam.to_vec() }, &g, &b, 1.3);
        assert!(lin.explanation.max_abs_diff(&gen) < 1e-8);
    }

    #[test]
    fn multiplicative_special_cases() {
        let g = grid(2, 3);
        let b = BinIndices(vec![1, 1]);
        let ones = vec![UnaryFn::Constant { value: 1.0 }; 2];
        let e = beta_multiplicative(&ones, &g, &b, 0.7, 1e-12).unwrap();
        assert!((e.intercept - 1.0).abs() < 1e-14 && e.coefficients.iter().all(|c| c.abs() < 1e-14));
        let f = vec![UnaryFn::Constant { value: 3.0 }, UnaryFn::Gaussian { center: 0.3, width: 0.8 }];
        let e = beta_multiplicative(&f, &g, &b, 0.7, 1e-12).unwrap();
        assert!(e.coefficients[0].abs() < 1e-14);
        let gen = general(&ModelSpec::Multiplicative { factors: f }, &g, &b, 0.7);
        assert!(e.max_abs_diff(&gen) < 1e-8);
    }

    #[test]
    fn multiplicative_zero_normalizer() {
        let g = grid(1, 2);
        let f = vec![UnaryFn::Constant { value: 0.0 }];
        assert!(matches!(beta_multiplicative(&f, &g, &BinIndices(vec![0]), 1.0, 1e-10), Err(Error::ZeroNormalizer { index: 0 })));
    }

    #[test]
    fn relative_importance_cases() {
        let g = grid(2, 4);
        let b = BinIndices(vec![1, 2]);
        let full = Rectangle::new(vec![g.bin_bounds(0, 1).0, g.bin_bounds(1, 2).0], vec![g.bin_bounds(0, 1).1, g.bin_bounds(1, 2).1]).unwrap();
        assert!((relative_importance(&full, &g, &b).unwrap() - 1.0).abs() < 1e-14);
        let (lo, hi) = g.bin_bounds(0, 1);
        let w = 1e-8 * (hi - lo);
        let thin = Rectangle::new(vec![lo, full.lower[1]], vec![lo + w, full.upper[1]]).unwrap();
        assert!(relative_importance(&thin, &g, &b).unwrap() <= 1e-6);
    }

    #[test]
    fn relative_importance_symmetric_half() {
        let q = vec![vec![0.0, 1.0, 2.0]];
        let g = BinGrid::from_parts(q, vec![vec![0.5, 1.5]], vec![vec![0.3, 0.3]]).unwrap();
        let half = Rectangle::new(vec![0.0], vec![0.5]).unwrap();
        assert!((relative_importance(&half, &g, &BinIndices(vec![0])).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn distance_counts() {
        let enc = BinIndices(vec![1, 2]);
        assert_eq!(bin_distance(&BinIndices(vec![1, 2]), &enc), 0);
        assert_eq!(bin_distance(&BinIndices(vec![1, 0]), &enc), 1);
        assert_eq!(bin_distance(&BinIndices(vec![0, 0]), &enc), 2);
    }

    #[test]
    fn indicator_full_bin_at_xi() {
        let g = grid(2, 4);
        let b = BinIndices(vec![2, 1]);
        let nu = 1.2;
        let rect = Rectangle::new(vec![g.bin_bounds(0, 2).0, g.bin_bounds(1, 1).0], vec![g.bin_bounds(0, 2).1, g.bin_bounds(1, 1).1]).unwrap();
        let e = beta_indicator(&rect, 1.0, &g, &b, nu).unwrap();
        let want = 1.0 / (4.0 * c_const(4, nu));
        assert!(e.coefficients.iter().all(|c| (c - want).abs() < 1e-14));
        let e = beta_indicator(&rect, 1.0, &g, &BinIndices(vec![0, 1]), nu).unwrap();
        assert!(e.coefficients[0] < 0.0 && e.coefficients[1] > 0.0);
    }

    #[test]
    fn indicator_matches_multiplicative() {
        let g = grid(2, 3);
        let b = BinIndices(vec![0, 2]);
        let (lo0, hi0) = g.bin_bounds(0, 1);
        let (lo1, hi1) = g.bin_bounds(1, 2);
        let rect = Rectangle::new(vec![lo0 + 0.2 * (hi0 - lo0), lo1], vec![lo0 + 0.7 * (hi0 - lo0), lo1 + 0.5 * (hi1 - lo1)]).unwrap();
        let ind = beta_indicator(&rect, 2.0, &g, &b, 0.8).unwrap();
        let factors = vec![UnaryFn::Indicator { lo: rect.lower[0], hi: rect.upper[0] }, UnaryFn::Indicator { lo: rect.lower[1], hi: rect.upper[1] }];
        let mut mult = beta_multiplicative(&factors, &g, &b, 0.8, 1e-13).unwrap();
        mult.intercept *= 2.0;
        mult.coefficients.iter_mut().for_each(|c| *c *= 2.0);
        assert!(ind.max_abs_diff(&mult) < 1e-10);
    }

    #[test]
    fn partition_cases() {
        let g = grid(2, 3);
        let b = BinIndices(vec![1, 0]);
        let (s0, t0) = g.support(0);
        let (s1, t1) = g.support(1);
        let constant = vec![Cell { rect: Rectangle::new(vec![s0, s1], vec![t0, t1]).unwrap(), value: 1.7 }];
        let e = beta_partition(&refine_partition(&constant, &g).unwrap(), &g, &b, 0.9).unwrap();
        assert!((e.intercept - 1.7).abs() < 1e-12 && e.coefficients.iter().all(|c| c.abs() < 1e-12));
        let rect = Rectangle::new(vec![g.bin_bounds(0, 2).0, g.bin_bounds(1, 1).0], vec![g.bin_bounds(0, 2).1, g.bin_bounds(1, 1).1]).unwrap();
        let one = beta_partition(&[Cell { rect: rect.clone(), value: 0.5 }], &g, &b, 0.9).unwrap();
        assert!(one.max_abs_diff(&beta_indicator(&rect, 0.5, &g, &b, 0.9).unwrap()) < 1e-15);
    }

    #[test]
    fn kernel_e_matches_quadrature() {
        let g = grid(2, 4);
        let b = BinIndices(vec![1, 1]);
        let zeta = [0.4, -1.1];
        let e = kernel_e_coefficients(&zeta, 0.6, &g, &b, 1.0).unwrap();
        for j in 0..2 {
            for bin in 0..4 {
                let law = g.trunc_params(j, bin).unwrap();
                let q = conditional_expect(|x| (-(x - zeta[j]).powi(2) / 0.72).exp(), &law, 1e-13).unwrap();
                let w = if bin == 1 { 1.0 } else { off_bin(1.0) };
                assert!((e.e[j][bin] - w * q).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn kernel_flattens_and_vanishes() {
        let g = grid(1, 3);
        let b = BinIndices(vec![0]);
        let flat = kernel_e_coefficients(&[0.3], 4e6, &g, &b, 1e9).unwrap();
        assert!(flat.e[0].iter().all(|v| (v - 1.0).abs() < 1e-6));
        let (lo, _) = g.support(0);
        let far = kernel_e_coefficients(&[lo - 50.0], 0.05, &g, &b, 1.0).unwrap();
        assert!(far.e[0].iter().all(|&v| v <= 1e-8));
    }

    #[test]
    fn kernel_sum_matches_general() {
        let g = grid(3, 3);
        let b = BinIndices(vec![2, 0, 1]);
        let terms = vec![
            KernelTerm { alpha: 1.0, gamma: 0.9, center: vec![0.1, -0.5, 1.0], active: None },
            KernelTerm { alpha: -0.4, gamma: 1.5, center: vec![1.0, 0.0, 0.0], active: Some(vec![0, 2]) },
        ];
        let k = beta_kernel(&terms, &g, &b, 1.4).unwrap();
        let gen = general(&ModelSpec::KernelSum { terms }, &g, &b, 1.4);
        assert!(k.max_abs_diff(&gen) < 1e-8);
    }

    #[test]
    fn large_bandwidth_forms_agree() {
        let g = grid(2, 4);
        let b = BinIndices(vec![3, 1]);
        let model = ModelSpec::Additive { terms: vec![UnaryFn::Sine { amplitude: 1.0, frequency: 2.0, phase: 0.0 }, UnaryFn::identity()] };
        let lim = large_bandwidth_limit(&model, &g, &b, Method::Quadrature, 1e-12).unwrap();
        for (a, c) in lim.limit.coefficients.iter().zip(&lim.conditional_form) {
            assert!((a - c).abs() < 1e-10);
        }
        let far = general(&model, &g, &b, 1e6);
        assert!(far.max_abs_diff(&lim.limit) < 1e-4);
        let k = ModelSpec::Linear { intercept: 3.0, coefficients: vec![0.0, 0.0] };
        let lim = large_bandwidth_limit(&k, &g, &b, Method::Quadrature, 1e-12).unwrap();
        assert!((lim.limit.intercept - 3.0).abs() < 1e-12 && lim.limit.coefficients.iter().all(|c| c.abs() < 1e-12));
    }
}
