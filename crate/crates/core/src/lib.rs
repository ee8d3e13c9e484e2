//! Tabular policy evaluation with two temporal-difference estimators of the
//! variance of the λ-return: a direct estimator whose meta-reward is the
//! squared TD error, and the second-moment (VTD) estimator that reads the
//! variance out as `M - J²`.
//!
//! The crate is organised bottom-up:
//!
//! - [`mdp`]: finite MDPs with state-dependent γ and λ, policies, sampling and the
//!   two built-in benchmarks.
//! - [`oracles`]: ground truth from linear solves, Monte Carlo simulation and
//!   exhaustive trajectory enumeration.
//! - [`estimators`]: TD(λ), the direct and VTD variance learners, ADADELTA.
//! - [`experiments`]: presets, run orchestration, MSE and update-magnitude metrics.
//! - [`io`]: config/MDP/results documents, CSV and SVG emitters and the CLI.

pub mod error;
pub mod estimators;
pub mod experiments;
pub mod io;
mod linalg;
pub mod mdp;
pub mod oracles;
pub mod rng;

pub use error::{Error, Result};
pub use estimators::{Adadelta, DirectVar, StepSize, ValueTd, VtdEstimator, WeightingMode};
pub use experiments::{ExperimentConfig, RunResult};
pub use mdp::{Policy, Reward, TabularMdp, TransitionSample};
pub use oracles::GroundTruth;
