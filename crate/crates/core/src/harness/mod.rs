//! Experiment orchestration: configuration, seeded trials over the
//! training/decision-directed schedule, Monte Carlo averaging, sweeps and
//! result files.

pub mod config;
pub mod monte_carlo;
pub mod output;
pub mod sweep;
pub mod trial;

pub use config::{parse_config, parse_config_str, DetectorKind, ExperimentConfig};
pub use monte_carlo::{run_monte_carlo, DetectorSummary, ExperimentResult};
pub use output::{emit_csv, emit_sweep_csv, format_sig};
pub use sweep::{sweep, SweepAxis, SweepResult, SweepRow};
pub use trial::{run_trial, DetectorTrace, TrialOutcome};
