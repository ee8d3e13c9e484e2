//! Experiment configs, run orchestration, metrics and the preset catalog.

mod catalog;
mod config;
mod metrics;
mod run;
mod sweep;

pub use catalog::{preset, scenario_catalog, TABLE1_PRESETS};
pub use config::{
    Adaptive, EstimatorSet, ExperimentConfig, MdpSource, Problem, StepRule, ValueInit, VarianceInit,
};
pub use metrics::{aggregate, inject_value_error, mse, steady_state_mse, Aggregate, MseTable, UpdateMagnitude};
pub use run::{run_experiment, RunLog, RunResult, Series, Table};
pub use sweep::{sweep_step_sizes, BestStep, SweepCell, SweepResult};
