//! Tabular LIME on quantile bins, together with the closed forms of the
//! explanation it converges to when the number of perturbed samples grows.
//!
//! The pipeline is [`grid::fit_grid`] → [`sampler::sample_batch`] →
//! [`sampler::weights_default`] → [`surrogate::fit_surrogate`]. Limit
//! explanations come from [`theory::explain`] (per-family formulas) or
//! [`theory::beta_general`] (any model, by quadrature or Monte Carlo).
//! [`harness`] repeats the empirical fit and compares it with the limit.
//!
//! Runnable examples, one per capability:
//!
//! ```text
//! cargo run --release --example fit_grid
//! cargo run --release --example sampling
//! cargo run --release --example surrogate
//! cargo run --release --example theory_linear
//! cargo run --release --example indicator_field
//! cargo run --release --example kernel_dummy
//! cargo run --release --example cart_partition
//! cargo run --release --example general_weights
//! cargo run --release --example bandwidth_sweep
//! cargo run --release --example concentration_probe
//! cargo run --release --example bounds
//! cargo run --release --example config_run
//! ```

pub mod error;
pub mod grid;
pub mod harness;
pub mod models;
pub mod numerics;
pub mod sampler;
pub mod surrogate;
pub mod theory;

pub use error::{Error, Result};
