//! Normal law truncated to an interval: moments, sampling and conditional
//! expectations.
//!
//! Computations run on the standardized variable t = (x − μ)/σ. Where the
//! closed-form moments lose precision (far tails, intervals narrow relative
//! to σ) the density is integrated after shifting its log by the value at
//! the point of [ℓ, r] nearest zero, so nothing underflows.

use super::normal::{normal_cdf, normal_mass, normal_pdf, normal_quantile, normal_sf, normal_sf_quantile, x_pdf};
use super::quadrature::{integrate_pieces, QuadOptions};
use crate::error::{Error, Result};
use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Beyond this many standard units from the nearest point the shifted
/// density is below e^{-800} and is dropped from quadrature.
const CLIP: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncNormalParams {
    pub mu: f64,
    pub sigma: f64,
    pub lo: f64,
    pub hi: f64,
}

impl TruncNormalParams {
    pub fn new(mu: f64, sigma: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(mu.is_finite() && sigma.is_finite() && !lo.is_nan() && !hi.is_nan()) {
            return Err(Error::NonFinite("truncated normal parameters".into()));
        }
        if sigma <= 0.0 {
            return Err(Error::InvalidParameter(format!("sigma = {sigma} must be positive")));
        }
        if lo >= hi {
            return Err(Error::InvalidParameter(format!("empty interval [{lo}, {hi}]")));
        }
        let p = Self { mu, sigma, lo, hi };
        if p.mass() <= 0.0 {
            return Err(Error::DegenerateMass { lo, hi });
        }
        Ok(p)
    }

    pub fn ell(&self) -> f64 {
        (self.lo - self.mu) / self.sigma
    }

    pub fn r(&self) -> f64 {
        (self.hi - self.mu) / self.sigma
    }

    /// Φ(r) − Φ(ℓ).
    pub fn mass(&self) -> f64 {
        normal_mass(self.ell(), self.r())
    }

    /// Density of the truncated law at x (zero outside [lo, hi]).
    pub fn density(&self, x: f64) -> f64 {
        if x < self.lo || x > self.hi {
            return 0.0;
        }
        normal_pdf((x - self.mu) / self.sigma) / (self.sigma * self.mass())
    }

    /// Truncated-law probability of [a, b] ∩ [lo, hi].
    pub fn interval_mass(&self, a: f64, b: f64) -> f64 {
        let a = a.max(self.lo);
        let b = b.min(self.hi);
        if a >= b {
            return 0.0;
        }
        normal_mass((a - self.mu) / self.sigma, (b - self.mu) / self.sigma) / self.mass()
    }

    /// Standardized integration window and the log-shift anchor.
    fn window(&self) -> (f64, f64, f64) {
        let (l, r) = (self.ell(), self.r());
        let anchor = if l > 0.0 {
            l
        } else if r < 0.0 {
            r
        } else {
            0.0
        };
        (l.max(anchor - CLIP), r.min(anchor + CLIP), anchor)
    }

    fn closed_form_ok(&self) -> bool {
        let (l, r) = (self.ell(), self.r());
        r - l > 1.0 && l < 5.0 && r > -5.0
    }

    /// Mean and standard deviation of the truncated law.
    pub fn stats(&self) -> Result<(f64, f64)> {
        let z = self.mass();
        if z <= 0.0 {
            return Err(Error::DegenerateMass { lo: self.lo, hi: self.hi });
        }
        let (mean_t, var_t) = if self.closed_form_ok() {
            let (l, r) = (self.ell(), self.r());
            let m = (normal_pdf(l) - normal_pdf(r)) / z;
            let v = 1.0 + (x_pdf(l) - x_pdf(r)) / z - m * m;
            (m, v)
        } else {
            let (a, b, anchor) = self.window();
            let g = move |t: f64| (-0.5 * (t * t - anchor * anchor)).exp();
            let opts = QuadOptions::relative(1e-14);
            let norm = integrate_pieces(g, &[a, b], opts)?.value;
            let first = integrate_pieces(|t| (t - anchor) * g(t), &[a, b], QuadOptions::absolute(1e-16 * norm))?.value;
            let m = anchor + first / norm;
            let second = integrate_pieces(|t| (t - m).powi(2) * g(t), &[a, b], QuadOptions::relative(1e-13))?.value;
            (m, second / norm)
        };
        let mean = (self.mu + self.sigma * mean_t).clamp(self.lo, self.hi);
        let std = (self.sigma * var_t.max(0.0).sqrt()).min(self.sigma);
        Ok((mean, std))
    }

    /// One inverse-CDF draw; the uniform is taken from the open interval so
    /// the result lies in [lo, hi].
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.sample(Open01);
        self.quantile(u)
    }

    /// Truncated-law quantile.
    pub fn quantile(&self, u: f64) -> f64 {
        let (l, r) = (self.ell(), self.r());
        let z = self.mass();
        let t = if l >= 0.0 {
            // right tail: work with survival probabilities
            let q = normal_sf(l) - u * z;
            normal_sf_quantile(q)
        } else {
            let w = normal_cdf(l) + u * z;
            if w <= 0.5 {
                normal_quantile(w)
            } else {
                let q = normal_sf(r) + (1.0 - u) * z;
                normal_sf_quantile(q)
            }
        };
        (self.mu + self.sigma * t.clamp(l, r)).clamp(self.lo, self.hi)
    }
}

/// E[ψ(X)] for X following the truncated law, with absolute error ≤ `tol`.
pub fn conditional_expect<F: Fn(f64) -> f64>(psi: F, p: &TruncNormalParams, tol: f64) -> Result<f64> {
    conditional_expect_with_breaks(psi, p, &[], tol)
}

/// As [`conditional_expect`], with known discontinuities of ψ (in x units)
/// placed on subinterval edges.
pub fn conditional_expect_with_breaks<F: Fn(f64) -> f64>(
    psi: F,
    p: &TruncNormalParams,
    breaks: &[f64],
    tol: f64,
) -> Result<f64> {
    let (a, b, anchor) = p.window();
    let g = move |t: f64| (-0.5 * (t * t - anchor * anchor)).exp();
    let norm = integrate_pieces(g, &[a, b], QuadOptions::relative(1e-14))?.value;
    if norm <= 0.0 || !norm.is_finite() {
        return Err(Error::DegenerateMass { lo: p.lo, hi: p.hi });
    }
    let mut points = vec![a];
    for &x in breaks {
        let t = (x - p.mu) / p.sigma;
        if t > a && t < b {
            points.push(t);
        }
    }
    points.push(b);
    points.sort_by(f64::total_cmp);
    let (mu, sigma) = (p.mu, p.sigma);
    let (lo, hi) = (p.lo, p.hi);
    let integrand = |t: f64| psi((mu + sigma * t).clamp(lo, hi)) * g(t);
    let opts = QuadOptions { abs_tol: 0.5 * tol * norm, rel_tol: 0.0, max_intervals: 4000 };
    let num = integrate_pieces(integrand, &points, opts)?.value;
    Ok(num / norm)
}
