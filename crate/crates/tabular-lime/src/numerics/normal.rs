//! Standard normal distribution: density, CDF, survival function, quantile.

use libm::{erf, erfc};
use statrs::function::erf::erfc_inv;
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_677_939_946_059_934_381_9;

/// Standard normal density φ(x).
pub fn normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal CDF Φ(x), saturating at 0 and 1.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail 1 − Φ(x), accurate in the right tail.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

/// Φ(b) − Φ(a) for a ≤ b, evaluated on whichever side of zero keeps
/// the difference free of cancellation.
pub fn normal_mass(a: f64, b: f64) -> f64 {
    if a >= b {
        return 0.0;
    }
    if a.abs() < 1.0 && b.abs() < 1.0 {
        0.5 * (erf(b * FRAC_1_SQRT_2) - erf(a * FRAC_1_SQRT_2))
    } else if a >= 0.0 {
        normal_sf(a) - normal_sf(b)
    } else {
        normal_cdf(b) - normal_cdf(a)
    }
}

/// Quantile Φ⁻¹(u) for u ∈ (0, 1); returns ±∞ at the endpoints.
pub fn normal_quantile(u: f64) -> f64 {
    if u <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if u >= 1.0 {
        return f64::INFINITY;
    }
    let t = -SQRT_2 * erfc_inv(2.0 * u);
    if !t.is_finite() {
        return t;
    }
    // one Newton step against the accurate CDF on the tail nearer to t
    let resid = if t < 0.0 { normal_cdf(t) - u } else { (1.0 - u) - normal_sf(t) };
    t - resid / normal_pdf(t)
}

/// Upper-tail quantile: the t with 1 − Φ(t) = q.
pub fn normal_sf_quantile(q: f64) -> f64 {
    -normal_quantile(q)
}

/// x·φ(x), with the limit 0 at ±∞.
pub(crate) fn x_pdf(x: f64) -> f64 {
    if x.is_finite() {
        x * normal_pdf(x)
    } else {
        0.0
    }
}
