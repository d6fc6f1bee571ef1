//! Scalar probability primitives and the small linear-algebra kernels the
//! rest of the crate builds on.

pub mod linalg;
pub mod normal;
pub mod quadrature;
pub mod trunc;

pub use normal::{normal_cdf, normal_mass, normal_pdf, normal_quantile, normal_sf};
pub use quadrature::{integrate, integrate_pieces, Integral, QuadOptions};
pub use trunc::{conditional_expect, conditional_expect_with_breaks, TruncNormalParams};

/// Default absolute tolerance for conditional expectations.
pub const DEFAULT_TOL: f64 = 1e-10;
