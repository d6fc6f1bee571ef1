//! Acceptance criteria A1–A11. Runs without the libtest harness and prints
//! one PASS/FAIL line per criterion; the process fails if any criterion does.

mod common;

use common::*;
use rand::Rng;
use std::process::ExitCode;
use std::time::Instant;
use tabular_lime::grid::{fit_grid, BinGrid, BinIndices};
use tabular_lime::harness::{
    concentration_probe, lime_once, run_experiment_with, DataSource, ExperimentConfig, ExperimentReport, NuSpec, TolerancePolicy, XiSpec,
};
use tabular_lime::models::{refine_partition, KernelTerm, ModelSpec, Rectangle, UnaryFn};
use tabular_lime::numerics::linalg::{symmetric_spectral_norm, Cholesky, Matrix};
use tabular_lime::surrogate::Explanation;
use tabular_lime::theory::{
    beta_additive, beta_general, beta_indicator, beta_kernel, beta_linear, beta_multiplicative, beta_partition, c_const, default_nu, explain,
    large_bandwidth_limit, limit_system, robustness_bound, sigma_inv_norm_bound, sigma_matrix, ExplainOptions, Method, Setting,
};
use tabular_lime::Result;

type Outcome = Result<(bool, String)>;

const PLAIN_4SE: TolerancePolicy = TolerancePolicy { k_se: 4.0, floor: 0.0 };

fn opts() -> ExplainOptions {
    ExplainOptions { tol: 1e-10, ..Default::default() }
}

fn a1() -> Outcome {
    let mut r = rng(101);
    let mut worst: f64 = 0.0;
    let mut worst_family = "";
    for _ in 0..50 {
        let d = r.random_range(1..=3);
        let p = r.random_range(2..=5);
        let nu = r.random_range(0.5..10.0);
        let grid = random_grid(&mut r, d, p, 400);
        let b = random_bins(&mut r, d, p);

        let lin = random_linear(&mut r, d);
        let ModelSpec::Linear { intercept, coefficients } = &lin else { unreachable!() };
        let add = random_additive(&mut r, d);
        let ModelSpec::Additive { terms } = &add else { unreachable!() };
        let mult = random_multiplicative(&mut r, &grid);
        let ModelSpec::Multiplicative { factors } = &mult else { unreachable!() };
        let enclosure = random_bins(&mut r, d, p);
        let rect = random_rect_in_bin(&mut r, &grid, &enclosure);
        let value = r.random_range(-2.0..2.0);
        let ind = ModelSpec::IndicatorRect { rect: rect.clone(), value };
        let cells = random_partition(&mut r, &grid);
        let part = ModelSpec::Partition { cells: cells.clone() };
        let kern = random_kernel(&mut r, &grid, 2);
        let ModelSpec::KernelSum { terms: kterms } = &kern else { unreachable!() };

        let specialized: Vec<(&str, &ModelSpec, Explanation)> = vec![
            ("linear", &lin, beta_linear(*intercept, coefficients, &grid, &b, nu)?.explanation),
            ("additive", &add, beta_additive(terms, &grid, &b, nu, 1e-10)?),
            ("multiplicative", &mult, beta_multiplicative(factors, &grid, &b, nu, 1e-10)?),
            ("indicator", &ind, beta_indicator(&rect, value, &grid, &b, nu)?),
            ("partition", &part, beta_partition(&refine_partition(&cells, &grid)?, &grid, &b, nu)?),
            ("kernel", &kern, beta_kernel(kterms, &grid, &b, nu)?),
        ];
        let s = Setting::default_weights(&grid, &b, nu, 1e-10)?;
        for (name, model, beta) in specialized {
            let general = beta_general(model, &grid, &b, nu, Method::Quadrature, 1e-10)?;
            let system = limit_system(model, &s, Method::Quadrature)?.beta();
            let err = beta.max_abs_diff(&general).max(max_abs_diff(&beta.as_vector(), &system));
            if err > worst {
                worst = err;
                worst_family = name;
            }
        }
    }
    Ok((worst <= 1e-8, format!("300 comparisons, worst {worst:.2e} ({worst_family})")))
}

fn uniform(low: f64, high: f64, dim: usize, m: usize, seed: u64) -> DataSource {
    DataSource::Uniform { low, high, dim, m, seed }
}

fn run(cfg: &ExperimentConfig, policy: TolerancePolicy) -> Result<ExperimentReport> {
    let report = run_experiment_with(cfg, policy)?;
    if report.failed_repetitions() > 0 {
        return Err(tabular_lime::Error::InvalidParameter(format!("{} repetitions failed", report.failed_repetitions())));
    }
    Ok(report)
}

fn worst_z(report: &ExperimentReport) -> f64 {
    report.summary.iter().map(|s| (s.beta_hat_mean - s.beta_theory).abs() / s.beta_hat_se).fold(0.0, f64::max)
}

fn a2() -> Outcome {
    let d = 10;
    let coefficients = (0..d).map(|j| [1.0, -0.5, 2.0, 0.25, -1.5][j % 5]).collect();
    let mut cfg = ExperimentConfig::new(uniform(-10.0, 10.0, d, 20_000, 2), ModelSpec::Linear { intercept: 0.5, coefficients });
    cfg.nu = NuSpec::Value(7.5f64.sqrt());
    cfg.seed = 2;
    let report = run(&cfg, TolerancePolicy::default())?;
    let fails = report.summary.iter().filter(|s| !s.pass).count();
    Ok((report.all_pass(), format!("{fails} of {} coefficients outside 4SE+1e-3, max |z| {:.2}", d + 1, worst_z(&report))))
}

fn kernel_first_five(r: &mut rand_chacha::ChaCha8Rng, grid_lo: f64, grid_hi: f64, d: usize) -> ModelSpec {
    let terms = (0..3)
        .map(|_| KernelTerm {
            alpha: r.random_range(0.5..2.0),
            gamma: r.random_range(0.5..2.0),
            center: (0..d).map(|_| r.random_range(grid_lo..grid_hi)).collect(),
            active: Some((0..5).collect()),
        })
        .collect();
    ModelSpec::KernelSum { terms }
}

fn a3() -> Outcome {
    let d = 11;
    let model = kernel_first_five(&mut rng(3), -1.0, 1.0, d);
    let mut cfg = ExperimentConfig::new(uniform(-1.0, 1.0, d, 10_000, 3), model);
    cfg.seed = 3;
    let report = run(&cfg, PLAIN_4SE)?;
    let unused = &report.summary[6..];
    let empirical_ok = unused.iter().all(|s| s.beta_hat_mean.abs() <= 4.0 * s.beta_hat_se);
    let theory_max = unused.iter().map(|s| s.beta_theory.abs()).fold(0.0, f64::max);
    let z = unused.iter().map(|s| s.beta_hat_mean.abs() / s.beta_hat_se).fold(0.0, f64::max);
    Ok((empirical_ok && theory_max <= 1e-10, format!("unused coords: max |mean|/SE {z:.2}, max |theory| {theory_max:.1e}")))
}

fn a4() -> Outcome {
    let d = 4;
    let mut r = rng(4);
    let train = DataSource::uniform_points(-2.0, 2.0, d, 5000, 4);
    let grid = fit_grid(&train, 4)?;
    let f1 = random_kernel(&mut r, &grid, 2);
    let f2 = random_kernel(&mut r, &grid, 3);
    let sum = ModelSpec::sum(&f1, &f2);
    let data = uniform(-2.0, 2.0, d, 5000, 4);
    let mut reports = Vec::new();
    for (i, m) in [&f1, &f2, &sum].into_iter().enumerate() {
        let mut cfg = ExperimentConfig::new(data.clone(), m.clone());
        cfg.seed = 40 + i as u64;
        reports.push(run(&cfg, TolerancePolicy::default())?);
    }
    let (m1, m2, ms) = (reports[0].mean_vector(), reports[1].mean_vector(), reports[2].mean_vector());
    let (s1, s2, ss) = (reports[0].se_vector(), reports[1].se_vector(), reports[2].se_vector());
    let mut z: f64 = 0.0;
    let mut ok = true;
    for k in 0..=d {
        let dev = (ms[k] - m1[k] - m2[k]).abs();
        let se = (s1[k].powi(2) + s2[k].powi(2) + ss[k].powi(2)).sqrt();
        ok &= dev <= 4.0 * se;
        z = z.max(dev / se);
    }
    let b = grid.bin_id(&XiSpec::default().resolve(&grid)?)?;
    let nu = default_nu(d);
    let t1 = explain(&f1, &grid, &b, nu, opts())?.as_vector();
    let t2 = explain(&f2, &grid, &b, nu, opts())?.as_vector();
    let ts = explain(&sum, &grid, &b, nu, opts())?.as_vector();
    let theory_err = (0..=d).map(|k| (ts[k] - t1[k] - t2[k]).abs()).fold(0.0, f64::max);
    Ok((ok && theory_err <= 1e-10, format!("max deviation/combined SE {z:.2}, theory additivity error {theory_err:.1e}")))
}

fn a5() -> Outcome {
    let d = 10;
    let train = DataSource::uniform_points(-10.0, 10.0, d, 20_000, 5);
    let lambdas: Vec<f64> = (0..d).map(|j| if j % 2 == 0 { 1.0 } else { -0.5 }).collect();
    let xi = vec![0.0; d];
    let mut peak = Vec::new();
    for p in [4, 5] {
        let grid = fit_grid(&train, p)?;
        let lin = beta_linear(0.0, &lambdas, &grid, &grid.bin_id(&xi)?, default_nu(d))?;
        peak.push(lin.explanation.coefficients.iter().map(|v| v.abs()).fold(0.0, f64::max));
    }
    let ratio = peak[1] / peak[0];
    Ok((ratio <= 0.05, format!("max|β| p=4 {:.4}, p=5 {:.4}, ratio {ratio:.4}", peak[0], peak[1])))
}

fn a6() -> Outcome {
    let mut r = rng(6);
    let d = 3;
    let grid = random_grid(&mut r, d, 4, 2000);
    let b = random_bins(&mut r, d, 4);
    let cells = random_partition(&mut r, &grid);
    let enclosure = random_bins(&mut r, d, 4);
    let rect = random_rect_in_bin(&mut r, &grid, &enclosure);
    let models = vec![
        ("linear", random_linear(&mut r, d)),
        ("additive", random_additive(&mut r, d)),
        ("multiplicative", random_multiplicative(&mut r, &grid)),
        ("indicator", ModelSpec::IndicatorRect { rect, value: 1.5 }),
        ("partition", ModelSpec::Partition { cells }),
        ("kernel", random_kernel(&mut r, &grid, 2)),
    ];
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for (name, m) in &models {
        let far = beta_general(m, &grid, &b, 1e6, Method::Quadrature, 1e-10)?;
        let limit = large_bandwidth_limit(m, &grid, &b, Method::Quadrature, 1e-10)?;
        let err = far.max_abs_diff(&limit.limit);
        worst = worst.max(err);
        detail.push(format!("{name} {err:.0e}"));
    }
    Ok((worst <= 1e-4, detail.join(", ")))
}

fn full_bin(grid: &BinGrid, bins: [usize; 2]) -> Rectangle {
    let (l0, u0) = grid.bin_bounds(0, bins[0]);
    let (l1, u1) = grid.bin_bounds(1, bins[1]);
    Rectangle { lower: vec![l0, l1], upper: vec![u0, u1] }
}

fn a7() -> Outcome {
    let (d, p) = (2, 4);
    let data = uniform(-1.0, 1.0, d, 4000, 7);
    let grid = data.grid(p, std::path::Path::new(""))?;
    let nu = default_nu(d);
    let rect = full_bin(&grid, [1, 1]);
    let model = ModelSpec::IndicatorRect { rect, value: 1.0 };
    let pc = p as f64 * c_const(p, nu);
    let direct = (-1.0 / (2.0 * nu * nu)).exp() / pc;

    let aligned = explain(&model, &grid, &BinIndices(vec![1, 3]), nu, opts())?;
    let misaligned = explain(&model, &grid, &BinIndices(vec![3, 3]), nu, opts())?;
    let a_beta = aligned.coefficients[0];
    let theory_ok = a_beta > 0.0 && (a_beta - direct).abs() <= 1e-10 && misaligned.coefficients.iter().all(|v| *v < 0.0);

    let mut z: f64 = 0.0;
    let mut empirical_ok = true;
    for (i, bins) in [vec![2, 4], vec![4, 4]].into_iter().enumerate() {
        let mut cfg = ExperimentConfig::new(data.clone(), model.clone());
        cfg.p = p;
        cfg.xi = XiSpec::BinCenter { bin_center: bins };
        cfg.seed = 70 + i as u64;
        let report = run(&cfg, PLAIN_4SE)?;
        empirical_ok &= report.all_pass();
        z = z.max(worst_z(&report));
    }
    Ok((
        theory_ok && empirical_ok,
        format!(
            "aligned β_1 {a_beta:.6} (direct {direct:.6}), misaligned ({:.4}, {:.4}), empirical max |z| {z:.2}",
            misaligned.coefficients[0], misaligned.coefficients[1]
        ),
    ))
}

/// sup over the support of |Σ_j h_j(x_j)| from a dense per-coordinate scan.
fn additive_sup(terms: &[UnaryFn], grid: &BinGrid) -> f64 {
    let (mut hi, mut lo) = (0.0, 0.0);
    for (j, h) in terms.iter().enumerate() {
        let (a, b) = grid.support(j);
        let vals: Vec<f64> = (0..=10_000).map(|i| h.eval(a + (b - a) * i as f64 / 10_000.0)).collect();
        hi += vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        lo += vals.iter().cloned().fold(f64::INFINITY, f64::min);
    }
    f64::max(hi, -lo)
}

fn a8() -> Outcome {
    let mut r = rng(8);
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..20 {
        let d = r.random_range(1..=5);
        let p = r.random_range(2..=6);
        let nu = r.random_range(0.5..10.0);
        let grid = random_grid(&mut r, d, p, 500);
        let b = random_bins(&mut r, d, p);
        let f: Vec<UnaryFn> = (0..d).map(|_| random_cubic(&mut r)).collect();
        let h: Vec<UnaryFn> = (0..d)
            .map(|_| UnaryFn::Sine { amplitude: r.random_range(0.01..0.5), frequency: r.random_range(0.5..4.0), phase: r.random_range(0.0..6.3) })
            .collect();
        let g: Vec<UnaryFn> = f
            .iter()
            .zip(&h)
            .map(|(fj, hj)| {
                let (fj, hj) = (fj.clone(), hj.clone());
                UnaryFn::Custom(tabular_lime::models::CustomFn::new(move |x| fj.eval(x) + hj.eval(x)))
            })
            .collect();
        let bf = beta_additive(&f, &grid, &b, nu, 1e-10)?.as_vector();
        let bg = beta_additive(&g, &grid, &b, nu, 1e-10)?.as_vector();
        let dist = bf.iter().zip(&bg).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
        let bound = robustness_bound(d, p, nu, additive_sup(&h, &grid));
        worst_ratio = worst_ratio.max(dist / bound);
    }
    Ok((worst_ratio <= 1.0, format!("20 pairs, max ‖Δβ‖/bound {worst_ratio:.3e}")))
}

fn a9() -> Outcome {
    let d = 5;
    let model = ModelSpec::Linear { intercept: 0.0, coefficients: vec![1.0, -1.0, 0.5, 2.0, -0.5] };
    let mut cfg = ExperimentConfig::new(uniform(-1.0, 1.0, d, 5000, 9), model);
    cfg.seed = 9;
    let report = concentration_probe(&cfg, &[10_000, 40_000], 20)?;
    let ratio = report.sigma_ratios[0];
    Ok((report.passes((1.4, 2.9)), format!("median ratio {ratio:.3}, entries in [0,1]: {}", report.levels.iter().all(|l| l.sigma_entries_in_unit))))
}

fn a10() -> Outcome {
    let d = 10;
    let coefficients = (0..d).map(|j| [1.0, -0.5, 0.75, -1.0][j % 4]).collect();
    let mut cfg = ExperimentConfig::new(uniform(-1.0, 1.0, d, 5000, 10), ModelSpec::Linear { intercept: 0.0, coefficients });
    cfg.nu = NuSpec::Value(10.0);
    let prep = cfg.prepare()?;
    let mut worst: f64 = 0.0;
    let mut shrinks = true;
    for seed in 0..10 {
        let fit = |lambda| lime_once(&prep.model, &prep.grid, &prep.b_star, 5000, prep.nu, lambda, seed);
        let (b0, b1, b1000) = (fit(0.0)?, fit(1.0)?, fit(1000.0)?);
        worst = worst.max(b0.max_abs_diff(&b1));
        shrinks &= b1000.coefficient_norm() < b0.coefficient_norm();
    }
    Ok((worst <= 1e-2 && shrinks, format!("10 seeds, max |β̂(1) − β̂(0)| {worst:.2e}, λ=1000 shrinks: {shrinks}")))
}

fn numeric_inverse(a: &Matrix) -> Result<Matrix> {
    let chol = Cholesky::new(a, 0.0)?;
    let n = a.len();
    let cols: Vec<Vec<f64>> = (0..n).map(|k| chol.solve(&(0..n).map(|i| if i == k { 1.0 } else { 0.0 }).collect::<Vec<_>>())).collect();
    Ok((0..n).map(|i| (0..n).map(|k| cols[k][i]).collect()).collect())
}

fn a11() -> Outcome {
    let mut r = rng(11);
    let mut worst_ratio: f64 = 0.0;
    for t in 0..100 {
        let d = r.random_range(1..=6);
        let p = r.random_range(2..=6);
        let nu = r.random_range(0.5..10.0);
        let grid = random_grid(&mut r, d, p, 400);
        let s = if t % 2 == 0 {
            Setting::default_weights(&grid, &random_bins(&mut r, d, p), nu, 1e-10)?
        } else {
            let xi: Vec<f64> = (0..d).map(|j| {
                let (a, b) = grid.support(j);
                r.random_range(a..b)
            }).collect();
            let tau = (0..d).map(|j| {
                let (lo, hi) = grid.support(j);
                UnaryFn::Rescale { lo, hi }
            }).collect();
            Setting::general_weights(&grid, &xi, tau, nu, 1e-10)?
        };
        let n = s.normalizers()?;
        let norm = symmetric_spectral_norm(&numeric_inverse(&sigma_matrix(&n))?);
        worst_ratio = worst_ratio.max(norm / sigma_inv_norm_bound(n.big_c, d, p, nu));
    }
    Ok((worst_ratio <= 1.0, format!("100 grids (50 default, 50 general weights), max ‖Σ⁻¹‖/bound {worst_ratio:.3e}")))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] =
        [("A1", a1), ("A2", a2), ("A3", a3), ("A4", a4), ("A5", a5), ("A6", a6), ("A7", a7), ("A8", a8), ("A9", a9), ("A10", a10), ("A11", a11)];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| a.starts_with('A')).collect();
    let mut failed = 0;
    for (name, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|a| a == name) {
            continue;
        }
        let start = Instant::now();
        let (ok, detail) = match f() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!("{name} {verdict} [{:.1}s] {detail}", start.elapsed().as_secs_f64());
        failed += usize::from(!ok);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

