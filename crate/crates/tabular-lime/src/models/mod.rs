//! Black-box models with enough exposed structure for the theory engine,
//! plus a small CART fitter and partition/grid refinement.

mod cart;
mod partition;
mod unary;

pub use cart::fit_cart;
pub use partition::{refine_partition, Cell, Rectangle};
pub use unary::{CustomFn, UnaryFn};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;
use std::sync::Arc;

/// One Gaussian kernel term α·exp(−‖x_S − ζ_S‖²/(2γ²)) where S is `active`
/// (all coordinates when absent).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelTerm {
    pub alpha: f64,
    pub gamma: f64,
    pub center: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active: Option<Vec<usize>>,
}

impl KernelTerm {
    pub fn is_active(&self, j: usize) -> bool {
        self.active.as_ref().is_none_or(|a| a.contains(&j))
    }
}

/// A model known only through evaluation, with a caller-supplied bound C_f.
#[derive(Clone)]
pub struct OpaqueModel {
    pub f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    pub bound: f64,
    pub dim: usize,
}

impl OpaqueModel {
    pub fn new(dim: usize, bound: f64, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f), bound, dim }
    }
}

impl fmt::Debug for OpaqueModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OpaqueModel").field("bound", &self.bound).field("dim", &self.dim).finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelSpec {
    Linear { intercept: f64, coefficients: Vec<f64> },
    Additive { terms: Vec<UnaryFn> },
    Multiplicative { factors: Vec<UnaryFn> },
    IndicatorRect { rect: Rectangle, value: f64 },
    Partition { cells: Vec<Cell> },
    KernelSum { terms: Vec<KernelTerm> },
    #[serde(skip)]
    Opaque(OpaqueModel),
}

/// w·∏_k g_k(x_k); coordinates absent from `factors` contribute 1.
#[derive(Debug, Clone)]
pub struct ProductTerm {
    pub weight: f64,
    pub factors: Vec<(usize, UnaryFn)>,
}

impl ModelSpec {
    pub fn dim(&self) -> usize {
        match self {
            ModelSpec::Linear { coefficients, .. } => coefficients.len(),
            ModelSpec::Additive { terms } => terms.len(),
            ModelSpec::Multiplicative { factors } => factors.len(),
            ModelSpec::IndicatorRect { rect, .. } => rect.dim(),
            ModelSpec::Partition { cells } => cells.first().map_or(0, |c| c.rect.dim()),
            ModelSpec::KernelSum { terms } => terms.first().map_or(0, |t| t.center.len()),
            ModelSpec::Opaque(o) => o.dim,
        }
    }

    /// Check internal consistency (equal dimensions, positive widths).
    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        match self {
            ModelSpec::Partition { cells } => {
                for c in cells {
                    if c.rect.dim() != d {
                        return Err(Error::DimensionMismatch { expected: d, found: c.rect.dim() });
                    }
                    c.rect.validate()?;
                }
            }
            ModelSpec::IndicatorRect { rect, .. } => rect.validate()?,
            ModelSpec::KernelSum { terms } => {
                for t in terms {
                    if t.center.len() != d {
                        return Err(Error::DimensionMismatch { expected: d, found: t.center.len() });
                    }
                    if !(t.gamma > 0.0) {
                        return Err(Error::InvalidParameter(format!("kernel width {} must be positive", t.gamma)));
                    }
                    if t.active.as_ref().is_some_and(|a| a.iter().any(|&j| j >= d)) {
                        return Err(Error::InvalidParameter("kernel active index out of range".into()));
                    }
                }
            }
            ModelSpec::Opaque(o) => {
                if !(o.bound > 0.0) {
                    return Err(Error::InvalidParameter("opaque model needs a positive bound C_f".into()));
                }
            }
            _ => {}
        }
        if d == 0 {
            return Err(Error::InvalidParameter("model has no input coordinates".into()));
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        match self {
            ModelSpec::Linear { intercept, coefficients } => {
                intercept + coefficients.iter().zip(x).map(|(l, v)| l * v).sum::<f64>()
            }
            ModelSpec::Additive { terms } => terms.iter().zip(x).map(|(f, v)| f.eval(*v)).sum(),
            ModelSpec::Multiplicative { factors } => factors.iter().zip(x).map(|(f, v)| f.eval(*v)).product(),
            ModelSpec::IndicatorRect { rect, value } => {
                if rect.contains_closed(x) {
                    *value
                } else {
                    0.0
                }
            }
            ModelSpec::Partition { cells } => partition::evaluate_cells(cells, x),
            ModelSpec::KernelSum { terms } => terms
                .iter()
                .map(|t| {
                    let sq: f64 = (0..x.len()).filter(|&j| t.is_active(j)).map(|j| (x[j] - t.center[j]).powi(2)).sum();
                    t.alpha * (-sq / (2.0 * t.gamma * t.gamma)).exp()
                })
                .sum(),
            ModelSpec::Opaque(o) => (o.f)(x),
        }
    }

    /// The model as a sum of products of unary maps, when it has that form.
    pub fn product_terms(&self) -> Option<Vec<ProductTerm>> {
        let terms = match self {
            ModelSpec::Linear { intercept, coefficients } => {
                let mut t = vec![ProductTerm { weight: *intercept, factors: vec![] }];
                t.extend(
                    coefficients
                        .iter()
                        .enumerate()
                        .map(|(j, &l)| ProductTerm { weight: l, factors: vec![(j, UnaryFn::identity())] }),
                );
                t
            }
            ModelSpec::Additive { terms } => terms
                .iter()
                .enumerate()
                .map(|(j, f)| ProductTerm { weight: 1.0, factors: vec![(j, f.clone())] })
                .collect(),
            ModelSpec::Multiplicative { factors } => {
                vec![ProductTerm { weight: 1.0, factors: factors.iter().cloned().enumerate().collect() }]
            }
            ModelSpec::IndicatorRect { rect, value } => vec![rect.product_term(*value)],
            ModelSpec::Partition { cells } => cells.iter().map(|c| c.rect.product_term(c.value)).collect(),
            ModelSpec::KernelSum { terms } => terms
                .iter()
                .map(|t| ProductTerm {
                    weight: t.alpha,
                    factors: (0..t.center.len())
                        .filter(|&j| t.is_active(j))
                        .map(|j| (j, UnaryFn::Gaussian { center: t.center[j], width: t.gamma }))
                        .collect(),
                })
                .collect(),
            ModelSpec::Opaque(_) => return None,
        };
        Some(terms)
    }

    /// Pointwise sum of two models of the same dimension.
    pub fn sum(a: &ModelSpec, b: &ModelSpec) -> ModelSpec {
        match (a, b) {
            (ModelSpec::KernelSum { terms: x }, ModelSpec::KernelSum { terms: y }) => {
                ModelSpec::KernelSum { terms: x.iter().chain(y).cloned().collect() }
            }
            (
                ModelSpec::Linear { intercept: i1, coefficients: c1 },
                ModelSpec::Linear { intercept: i2, coefficients: c2 },
            ) => ModelSpec::Linear {
                intercept: i1 + i2,
                coefficients: c1.iter().zip(c2).map(|(u, v)| u + v).collect(),
            },
            _ => {
                let (fa, fb) = (a.clone(), b.clone());
                let bound = a.sup_bound().unwrap_or(f64::INFINITY) + b.sup_bound().unwrap_or(f64::INFINITY);
                ModelSpec::Opaque(OpaqueModel::new(a.dim(), bound, move |x| fa.evaluate(x) + fb.evaluate(x)))
            }
        }
    }

    /// A known bound on |f|, when available without a grid.
    pub fn sup_bound(&self) -> Option<f64> {
        match self {
            ModelSpec::Opaque(o) => Some(o.bound),
            ModelSpec::IndicatorRect { value, .. } => Some(value.abs()),
            ModelSpec::Partition { cells } => Some(cells.iter().map(|c| c.value.abs()).fold(0.0, f64::max)),
            ModelSpec::KernelSum { terms } => Some(terms.iter().map(|t| t.alpha.abs()).sum()),
            _ => None,
        }
    }

    pub fn is_serializable(&self) -> bool {
        match self {
            ModelSpec::Opaque(_) => false,
            ModelSpec::Additive { terms } => terms.iter().all(UnaryFn::is_serializable),
            ModelSpec::Multiplicative { factors } => factors.iter().all(UnaryFn::is_serializable),
            _ => true,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: ModelSpec = serde_json::from_str(s)?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
