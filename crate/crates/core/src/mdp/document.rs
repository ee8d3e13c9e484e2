//! TOML representation of an MDP together with its behavior and target policies.
//!
//! ```toml
//! schema_version = 1
//! num_states = 2
//! episodic = false
//! gamma = [0.9, 0.0]
//! lam = [1.0, 1.0]
//! start = [1.0, 0.0]
//! behavior = [[1.0], [1.0]]
//! target = [[1.0], [1.0]]
//!
//! [[transitions]]
//! state = 0
//! action = 0
//! next = 1
//! prob = 1.0
//! reward = { kind = "normal", mean = 1.0, var = 0.5 }
//! ```
//!
//! Each state's actions are numbered from 0 and every action needs at least
//! one transition entry. Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ensure_valid, Action, Outcome, Policy, Reward, TabularMdp};
use crate::error::{Error, Result};

pub const MDP_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MdpDocument {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub num_states: usize,
    #[serde(default)]
    pub episodic: bool,
    pub gamma: Vec<f64>,
    pub lam: Vec<f64>,
    pub start: Vec<f64>,
    pub behavior: Vec<Vec<f64>>,
    pub target: Vec<Vec<f64>>,
    pub transitions: Vec<TransitionEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionEntry {
    pub state: usize,
    pub action: usize,
    pub next: usize,
    pub prob: f64,
    pub reward: RewardEntry,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RewardEntry {
    Constant { value: f64 },
    Normal { mean: f64, var: f64 },
}

impl From<Reward> for RewardEntry {
    fn from(r: Reward) -> Self {
        match r {
            Reward::Constant(value) => RewardEntry::Constant { value },
            Reward::Normal { mean, var } => RewardEntry::Normal { mean, var },
        }
    }
}

impl From<RewardEntry> for Reward {
    fn from(r: RewardEntry) -> Self {
        match r {
            RewardEntry::Constant { value } => Reward::Constant(value),
            RewardEntry::Normal { mean, var } => Reward::Normal { mean, var },
        }
    }
}

impl MdpDocument {
    pub fn from_model(mdp: &TabularMdp, mu: &Policy, pi: &Policy, name: Option<&str>) -> Self {
        let mut transitions = Vec::new();
        for (s, acts) in mdp.actions.iter().enumerate() {
            for (a, act) in acts.iter().enumerate() {
                for o in &act.outcomes {
                    transitions.push(TransitionEntry {
                        state: s,
                        action: a,
                        next: o.next,
                        prob: o.prob,
                        reward: o.reward.into(),
                    });
                }
            }
        }
        MdpDocument {
            schema_version: MDP_SCHEMA_VERSION,
            name: name.map(str::to_owned),
            num_states: mdp.num_states(),
            episodic: mdp.episodic,
            gamma: mdp.gamma.clone(),
            lam: mdp.lam.clone(),
            start: mdp.start.clone(),
            behavior: mu.probs.clone(),
            target: pi.probs.clone(),
            transitions,
        }
    }

    /// Builds and validates `(mdp, behavior, target)`.
    pub fn into_model(self) -> Result<(TabularMdp, Policy, Policy)> {
        if self.schema_version != MDP_SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported MDP schema_version {} (expected {MDP_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let n = self.num_states;
        if self.behavior.len() != n || self.target.len() != n {
            return Err(Error::Config(format!(
                "policy tables must have {n} rows"
            )));
        }
        let mut actions: Vec<Vec<Action>> = self
            .behavior
            .iter()
            .map(|row| vec![Action::default(); row.len()])
            .collect();
        for t in &self.transitions {
            let slot = actions
                .get_mut(t.state)
                .and_then(|acts| acts.get_mut(t.action))
                .ok_or_else(|| {
                    Error::Config(format!(
                        "transition for undeclared state/action ({}, {})",
                        t.state, t.action
                    ))
                })?;
            slot.outcomes.push(Outcome {
                next: t.next,
                prob: t.prob,
                reward: t.reward.into(),
            });
        }
        for (s, acts) in actions.iter().enumerate() {
            if let Some(a) = acts.iter().position(|a| a.outcomes.is_empty()) {
                return Err(Error::Config(format!(
                    "state {s} action {a} has no transitions"
                )));
            }
        }
        let mdp = TabularMdp {
            actions,
            gamma: self.gamma,
            lam: self.lam,
            start: self.start,
            episodic: self.episodic,
        };
        let mu = Policy { probs: self.behavior };
        let pi = Policy { probs: self.target };
        ensure_valid(&mdp, &pi, &mu)?;
        Ok((mdp, mu, pi))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("MDP documents always serialize")
    }

    pub fn from_toml(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

pub fn load_mdp(path: &Path) -> Result<(TabularMdp, Policy, Policy)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    MdpDocument::from_toml(&text)
        .map_err(|e| Error::document(path, e))?
        .into_model()
}

pub fn save_mdp(path: &Path, mdp: &TabularMdp, mu: &Policy, pi: &Policy, name: Option<&str>) -> Result<()> {
    let doc = MdpDocument::from_model(mdp, mu, pi, name);
    std::fs::write(path, doc.to_toml()).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{builtin_chain, builtin_complex4};

    #[test]
    fn builtins_round_trip() {
        for (mdp, mu, pi) in [builtin_chain(), builtin_complex4()] {
            let text = MdpDocument::from_model(&mdp, &mu, &pi, Some("x")).to_toml();
            let (m2, mu2, pi2) = MdpDocument::from_toml(&text).unwrap().into_model().unwrap();
            assert_eq!(m2, mdp);
            assert_eq!(mu2, mu);
            assert_eq!(pi2, pi);
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let (mdp, mu, pi) = builtin_chain();
        let text = MdpDocument::from_model(&mdp, &mu, &pi, None).to_toml();
        let bad = format!("colour = \"red\"\n{text}");
        assert!(MdpDocument::from_toml(&bad).is_err());
    }

    #[test]
    fn invalid_model_is_reported() {
        let (mdp, mu, pi) = builtin_chain();
        let mut doc = MdpDocument::from_model(&mdp, &mu, &pi, None);
        doc.gamma[4] = 1.0;
        assert!(matches!(doc.into_model(), Err(Error::InvalidMdp(_))));
    }

    #[test]
    fn missing_action_is_reported() {
        let (mdp, mu, pi) = builtin_complex4();
        let mut doc = MdpDocument::from_model(&mdp, &mu, &pi, None);
        doc.transitions.retain(|t| !(t.state == 1 && t.action == 1));
        assert!(matches!(doc.into_model(), Err(Error::Config(_))));
    }
}
