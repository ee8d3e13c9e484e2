//! Incremental learners: TD(λ) for the value, the direct variance estimator,
//! the second-moment (VTD) estimator, and per-state ADADELTA step sizes.
//!
//! Within a timestep the value learner runs first. The variance learners then
//! see its TD error `δ` (computed from the pre-update table) together with the
//! post-update value table.

mod adadelta;
mod direct;
mod traces;
mod value;
mod vtd;

pub use adadelta::{Adadelta, ADADELTA_DECAY, ADADELTA_EPSILON};
pub use direct::DirectVar;
pub use traces::Trace;
pub use value::ValueTd;
pub use vtd::{vtd_meta_reward, vtd_meta_reward_squared_form, VtdEstimator};

use serde::{Deserialize, Serialize};

/// Which variance is being estimated, fixing the weightings `η` (inside the
/// return) and `ρ̄` (on the variance learner's trace).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WeightingMode {
    /// `η = 1`, `ρ̄ = 1`, value trace weight 1.
    #[default]
    OnPolicy,
    /// Variance of the target λ-return from behavior samples: `η = 1`, `ρ̄ = ρ`.
    OffPolicyTargetVariance,
    /// Variance of the ρ-weighted return: `η = ρ`, `ρ̄ = 1`.
    OffPolicyReturnVariance,
}

impl WeightingMode {
    pub fn eta(self, rho: f64) -> f64 {
        match self {
            WeightingMode::OffPolicyReturnVariance => rho,
            _ => 1.0,
        }
    }

    pub fn rho_bar(self, rho: f64) -> f64 {
        match self {
            WeightingMode::OffPolicyTargetVariance => rho,
            _ => 1.0,
        }
    }

    pub fn value_trace_weight(self, rho: f64) -> f64 {
        match self {
            WeightingMode::OnPolicy => 1.0,
            _ => rho,
        }
    }

    pub fn is_off_policy(self) -> bool {
        self != WeightingMode::OnPolicy
    }

    pub fn name(self) -> &'static str {
        match self {
            WeightingMode::OnPolicy => "on_policy",
            WeightingMode::OffPolicyTargetVariance => "off_policy_target_variance",
            WeightingMode::OffPolicyReturnVariance => "off_policy_return_variance",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            WeightingMode::OnPolicy,
            WeightingMode::OffPolicyTargetVariance,
            WeightingMode::OffPolicyReturnVariance,
        ]
        .into_iter()
        .find(|m| m.name() == s)
    }
}

/// Step-size rule of one learner.
#[derive(Debug, Clone, PartialEq)]
pub enum StepSize {
    Constant(f64),
    Adadelta(Adadelta),
}

impl StepSize {
    /// Step size to use at state `s` for TD error `g`.
    pub fn rate(&mut self, s: usize, g: f64) -> f64 {
        match self {
            StepSize::Constant(a) => *a,
            StepSize::Adadelta(ad) => ad.step(s, g),
        }
    }

    /// Reports the update that was applied at `s`.
    pub fn record(&mut self, s: usize, applied: f64) {
        if let StepSize::Adadelta(ad) = self {
            ad.accumulate(s, applied);
        }
    }
}
