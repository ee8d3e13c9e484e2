use super::config::{Adaptive, ExperimentConfig, MdpSource, StepRule, ValueInit, VarianceInit};
use crate::error::{Error, Result};
use crate::estimators::WeightingMode;

/// Chain runs, in episodes.
const CHAIN_EPISODES: usize = 20_000;
/// Complex MDP runs, in timesteps.
const COMPLEX_STEPS: usize = 200_000;

/// Presets with a row in the update-magnitude table.
pub const TABLE1_PRESETS: [&str; 8] = ["fig4", "fig5", "fig6", "fig7", "fig9", "fig10", "fig14", "fig15"];

fn chain(name: &str, alpha: f64, alpha_bar: f64, seed: u64) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(name, MdpSource::Chain, alpha, alpha_bar, CHAIN_EPISODES);
    c.log_every = 10;
    c.base_seed = seed;
    c
}

fn complex(name: &str, alpha: f64, alpha_bar: f64, seed: u64) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(name, MdpSource::Complex4, alpha, alpha_bar, COMPLEX_STEPS);
    c.log_every = 100;
    c.base_seed = seed;
    c
}

fn error_injection(name: &str, err_ratio: f64, seed: u64) -> ExperimentConfig {
    let mut c = complex(name, 0.0, 0.01, seed);
    c.num_runs = 120;
    c.run_length = 80_000;
    c.steady_state_window = Some(10_000);
    c.value_init = ValueInit::TruthPlusError { err_ratio };
    c.value_frozen = true;
    c
}

/// Presets for every figure of the study.
///
/// Run lengths the study leaves open are 20,000 episodes on the chain and
/// 200,000 timesteps on the complex MDP.
pub fn scenario_catalog() -> Vec<ExperimentConfig> {
    let mut out = vec![
        chain("fig4", 0.001, 0.001, 4_000),
        chain("fig5", 0.01, 0.001, 5_000),
        chain("fig6", 0.001, 0.01, 6_000),
    ];

    let mut fig7 = chain("fig7", 0.0, 0.001, 7_000);
    fig7.value_init = ValueInit::Truth;
    fig7.value_frozen = true;
    out.push(fig7);

    // Base cell of the α × ᾱ sweep; the grid replaces both step sizes.
    let mut fig8 = chain("fig8", 0.01, 0.01, 8_000);
    fig8.run_length = 2_000;
    fig8.log_every = 1;
    fig8.steady_state_window = Some(2_000);
    fig8.value_init = ValueInit::Truth;
    fig8.variance_init = VarianceInit::Truth;
    out.push(fig8);

    let mut fig9 = chain("fig9", 0.0, 0.0, 9_000);
    fig9.alpha = StepRule::Adaptive(Adaptive::Adadelta);
    fig9.alpha_bar = StepRule::Adaptive(Adaptive::Adadelta);
    out.push(fig9);

    out.push(complex("fig10", 0.01, 0.01, 10_000));
    out.push(error_injection("fig11", 1.0, 11_000));
    out.push(error_injection("fig12", 0.5, 12_000));

    let mut fig13a = complex("fig13a", 0.01, 0.01, 13_000);
    fig13a.kappa = 0.0;
    fig13a.kappa_bar = 1.0;
    out.push(fig13a);
    let mut fig13b = complex("fig13b", 0.01, 0.01, 13_500);
    fig13b.kappa = 1.0;
    fig13b.kappa_bar = 0.0;
    out.push(fig13b);

    let mut fig14 = complex("fig14", 0.01, 0.01, 14_000);
    fig14.mode = WeightingMode::OffPolicyTargetVariance;
    out.push(fig14);
    let mut fig15 = complex("fig15", 0.01, 0.01, 15_000);
    fig15.mode = WeightingMode::OffPolicyReturnVariance;
    out.push(fig15);
    out
}

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    scenario_catalog()
        .into_iter()
        .find(|c| c.name == name)
        .ok_or_else(|| Error::UnknownPreset(name.to_owned()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::EstimatorSet;
    use std::collections::HashSet;

    #[test]
    fn catalog_is_valid_and_unique() {
        let cat = scenario_catalog();
        assert!(cat.len() >= 12);
        let names: HashSet<_> = cat.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names.len(), cat.len());
        for c in &cat {
            c.validate().unwrap();
            c.problem().unwrap();
        }
        for name in TABLE1_PRESETS {
            assert!(names.contains(name));
        }
    }

    #[test]
    fn step_size_presets() {
        let f5 = preset("fig5").unwrap();
        assert_eq!((f5.alpha, f5.alpha_bar), (StepRule::Constant(0.01), StepRule::Constant(0.001)));
        assert_eq!(f5.mdp, MdpSource::Chain);
        assert_eq!(f5.estimators, EstimatorSet::Both);
        let f13b = preset("fig13b").unwrap();
        assert_eq!((f13b.kappa, f13b.kappa_bar), (1.0, 0.0));
        assert_eq!(f13b.mdp, MdpSource::Complex4);
    }

    #[test]
    fn unknown_preset_is_named() {
        let err = preset("nosuch").unwrap_err();
        assert!(err.to_string().contains("nosuch"));
    }
}
