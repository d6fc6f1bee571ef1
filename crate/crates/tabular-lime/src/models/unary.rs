use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// A closure-backed unary map with its known discontinuities.
#[derive(Clone)]
pub struct CustomFn {
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub breaks: Vec<f64>,
}

impl CustomFn {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f), breaks: Vec::new() }
    }

    pub fn with_breaks(mut self, breaks: Vec<f64>) -> Self {
        self.breaks = breaks;
        self
    }
}

impl fmt::Debug for CustomFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomFn").field("breaks", &self.breaks).finish_non_exhaustive()
    }
}

/// One-dimensional building block of additive, multiplicative and
/// weight-transform specifications.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UnaryFn {
    Constant { value: f64 },
    /// Σ_k coeffs[k]·x^k.
    Polynomial { coeffs: Vec<f64> },
    /// exp(−(x − center)²/(2·width²)).
    Gaussian { center: f64, width: f64 },
    /// 1 on the closed interval [lo, hi].
    Indicator { lo: f64, hi: f64 },
    /// amplitude·sin(frequency·x + phase).
    Sine { amplitude: f64, frequency: f64, phase: f64 },
    /// (x − lo)/(hi − lo), the affine rescaling of [lo, hi] onto [0, 1].
    Rescale { lo: f64, hi: f64 },
    #[serde(skip)]
    Custom(CustomFn),
}

impl UnaryFn {
    pub fn identity() -> Self {
        UnaryFn::Polynomial { coeffs: vec![0.0, 1.0] }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            UnaryFn::Constant { value } => *value,
            UnaryFn::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c),
            UnaryFn::Gaussian { center, width } => (-(x - center).powi(2) / (2.0 * width * width)).exp(),
            UnaryFn::Indicator { lo, hi } => {
                if x >= *lo && x <= *hi {
                    1.0
                } else {
                    0.0
                }
            }
            UnaryFn::Sine { amplitude, frequency, phase } => amplitude * (frequency * x + phase).sin(),
            UnaryFn::Rescale { lo, hi } => (x - lo) / (hi - lo),
            UnaryFn::Custom(c) => (c.f)(x),
        }
    }

    /// Points where the map may jump.
    pub fn breaks(&self) -> Vec<f64> {
        match self {
            UnaryFn::Indicator { lo, hi } => vec![*lo, *hi],
            UnaryFn::Custom(c) => c.breaks.clone(),
            _ => Vec::new(),
        }
    }

    pub fn constant_value(&self) -> Option<f64> {
        match self {
            UnaryFn::Constant { value } => Some(*value),
            UnaryFn::Polynomial { coeffs } if coeffs.iter().skip(1).all(|&c| c == 0.0) => {
                Some(coeffs.first().copied().unwrap_or(0.0))
            }
            _ => None,
        }
    }

    pub fn is_serializable(&self) -> bool {
        !matches!(self, UnaryFn::Custom(_))
    }
}
