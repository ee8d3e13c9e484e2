use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{Adadelta, StepSize, WeightingMode};
use crate::mdp::{builtin_chain, builtin_complex4, ensure_valid, load_mdp, Policy, TabularMdp};
use crate::oracles::{ground_truth, GroundTruth};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MdpSource {
    Chain,
    Complex4,
    /// An MDP document on disk.
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Adaptive {
    Adadelta,
}

/// A step size in a config: a number, or the string `"adadelta"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StepRule {
    Constant(f64),
    Adaptive(Adaptive),
}

impl StepRule {
    pub fn build(self, num_states: usize) -> StepSize {
        match self {
            StepRule::Constant(a) => StepSize::Constant(a),
            StepRule::Adaptive(Adaptive::Adadelta) => StepSize::Adadelta(Adadelta::new(num_states)),
        }
    }

    pub fn is_adaptive(self) -> bool {
        matches!(self, StepRule::Adaptive(_))
    }

    pub fn constant(self) -> Option<f64> {
        match self {
            StepRule::Constant(a) => Some(a),
            StepRule::Adaptive(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorSet {
    Direct,
    Vtd,
    #[default]
    Both,
}

impl EstimatorSet {
    pub fn direct(self) -> bool {
        self != EstimatorSet::Vtd
    }

    pub fn vtd(self) -> bool {
        self != EstimatorSet::Direct
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ValueInit {
    #[default]
    Zero,
    Truth,
    /// Truth plus independent Uniform[-ζ, ζ] noise, `ζ = max_s |v(s)| · err_ratio`.
    TruthPlusError { err_ratio: f64 },
}

/// Initial variance tables. `Truth` sets the direct table to `v` and the
/// second moment to `v + j²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum VarianceInit {
    #[default]
    Zero,
    Truth,
}

fn default_runs() -> usize {
    30
}

fn default_log_every() -> usize {
    1
}

/// One experiment: an MDP, a weighting mode, step sizes and traces for the
/// three learners, and the run protocol.
///
/// `run_length`, `log_every` and `steady_state_window` count episodes on
/// episodic MDPs and timesteps on continuing ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub mdp: MdpSource,
    #[serde(default)]
    pub mode: WeightingMode,
    pub alpha: StepRule,
    pub alpha_bar: StepRule,
    #[serde(default)]
    pub kappa: f64,
    #[serde(default)]
    pub kappa_bar: f64,
    #[serde(default)]
    pub estimators: EstimatorSet,
    #[serde(default = "default_runs")]
    pub num_runs: usize,
    pub run_length: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub value_init: ValueInit,
    #[serde(default)]
    pub variance_init: VarianceInit,
    #[serde(default)]
    pub value_frozen: bool,
    #[serde(default = "default_log_every")]
    pub log_every: usize,
    /// Defaults to the last 5% of the run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steady_state_window: Option<usize>,
}

/// The sampled problem of an experiment. On-policy experiments evaluate the
/// behavior policy.
#[derive(Debug, Clone)]
pub struct Problem {
    pub mdp: TabularMdp,
    pub behavior: Policy,
    pub target: Policy,
}

impl ExperimentConfig {
    /// A config with the default protocol: zero initialisation, no traces,
    /// both estimators, 30 runs, logging every unit.
    pub fn new(name: &str, mdp: MdpSource, alpha: f64, alpha_bar: f64, run_length: usize) -> Self {
        ExperimentConfig {
            name: name.to_owned(),
            mdp,
            mode: WeightingMode::OnPolicy,
            alpha: StepRule::Constant(alpha),
            alpha_bar: StepRule::Constant(alpha_bar),
            kappa: 0.0,
            kappa_bar: 0.0,
            estimators: EstimatorSet::Both,
            num_runs: default_runs(),
            run_length,
            base_seed: 0,
            value_init: ValueInit::Zero,
            variance_init: VarianceInit::Zero,
            value_frozen: false,
            log_every: 1,
            steady_state_window: None,
        }
    }

    pub fn window(&self) -> usize {
        self.steady_state_window
            .unwrap_or_else(|| (self.run_length / 20).max(1).min(self.run_length))
    }

    /// Number of logged points covering the steady-state window (at least one).
    pub fn window_points(&self) -> usize {
        self.window().div_ceil(self.log_every.max(1)).max(1)
    }

    /// Configuration checks that do not need the MDP.
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(format!("{}: {m}", self.name)));
        if self.num_runs == 0 {
            return fail("num_runs must be at least 1".into());
        }
        if self.log_every == 0 {
            return fail("log_every must be at least 1".into());
        }
        if let Some(w) = self.steady_state_window {
            if w > self.run_length {
                return fail(format!(
                    "steady_state_window {w} exceeds run_length {}",
                    self.run_length
                ));
            }
        }
        for (what, rule) in [("alpha", self.alpha), ("alpha_bar", self.alpha_bar)] {
            if let StepRule::Constant(a) = rule {
                if !(a.is_finite() && a >= 0.0) {
                    return fail(format!("{what} must be a nonnegative number, got {a}"));
                }
            }
        }
        for (what, k) in [("kappa", self.kappa), ("kappa_bar", self.kappa_bar)] {
            if !(0.0..=1.0).contains(&k) {
                return fail(format!("{what} must lie in [0, 1], got {k}"));
            }
        }
        if let ValueInit::TruthPlusError { err_ratio } = self.value_init {
            if !(err_ratio.is_finite() && err_ratio >= 0.0) {
                return fail(format!("err_ratio must be nonnegative, got {err_ratio}"));
            }
        }
        Ok(())
    }

    pub fn problem(&self) -> Result<Problem> {
        let (mdp, mu, pi) = match &self.mdp {
            MdpSource::Chain => builtin_chain(),
            MdpSource::Complex4 => builtin_complex4(),
            MdpSource::File(path) => load_mdp(path)?,
        };
        let target = if self.mode.is_off_policy() { pi } else { mu.clone() };
        ensure_valid(&mdp, &target, &mu)?;
        Ok(Problem {
            mdp,
            behavior: mu,
            target,
        })
    }

    /// Exact ground truth for this experiment's problem and weighting mode.
    pub fn truth(&self) -> Result<GroundTruth> {
        let p = self.problem()?;
        ground_truth(&p.mdp, &p.behavior, &p.target, self.mode)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs always serialize")
    }
}
