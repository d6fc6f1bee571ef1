//! Experiment plumbing: configuration, repeated empirical fits against the
//! limit explanation, bandwidth sweeps, concentration probes and 2-D
//! explanation fields. Every table it writes is plain CSV.

mod config;
mod experiment;
mod field;
mod probe;
mod sweep;

pub use config::{DataSource, ExperimentConfig, ModelRef, NuKeyword, NuSpec, Outputs, Prepared, XiKeyword, XiSpec};
pub use experiment::{
    column_stats, lime_once, recheck_summary_csv, run_experiment, run_experiment_with, run_repetitions,
    CoefficientSummary, ExperimentReport, RepetitionResult, TolerancePolicy,
};
pub use field::{field_map, write_field_csv, FieldRow};
pub use probe::{concentration_probe, empirical_system, median, ConcentrationReport, ProbeLevel};
pub use sweep::{sign_changes, sweep_bandwidth, BandwidthSweep};
