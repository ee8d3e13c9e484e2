use rand::Rng;
use serde::{Deserialize, Serialize};

use super::run::{RunResult, Series, Table};
use crate::error::{Error, Result};
use crate::oracles::GroundTruth;

/// Cross-run mean and population standard deviation, `[logged time][state]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean: Table,
    pub std: Table,
}

/// Aggregates runs in the order given (two-pass, dividing by the run count).
pub fn aggregate(runs: &[&Table]) -> Aggregate {
    let k = runs.len() as f64;
    let times = runs[0].len();
    let states = runs[0].first().map_or(0, Vec::len);
    let mut mean = vec![vec![0.0; states]; times];
    let mut std = vec![vec![0.0; states]; times];
    for t in 0..times {
        for s in 0..states {
            let m = runs.iter().map(|r| r[t][s]).sum::<f64>() / k;
            let var = runs.iter().map(|r| (r[t][s] - m).powi(2)).sum::<f64>() / k;
            mean[t][s] = m;
            std[t][s] = var.sqrt();
        }
    }
    Aggregate { mean, std }
}

/// Average absolute update sizes: total change over all states per episode
/// (episodic) or per timestep (continuing). `vtd` is the change of `M - J²`
/// across the whole timestep.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct UpdateMagnitude {
    pub value: f64,
    pub second_moment: f64,
    pub vtd: f64,
    pub direct: f64,
}

/// `J(s) = j(s) + u(s)` with `u(s) ~ Uniform[-ζ, ζ]` and `ζ = max_s |v(s)| · err_ratio`.
pub fn inject_value_error<R: Rng + ?Sized>(
    j: &[f64],
    err_ratio: f64,
    v_truth: &[f64],
    rng: &mut R,
) -> Vec<f64> {
    let zeta = v_truth.iter().fold(0.0f64, |m, v| m.max(v.abs())) * err_ratio;
    j.iter()
        .map(|&x| {
            if zeta > 0.0 {
                x + rng.random_range(-zeta..=zeta)
            } else {
                x
            }
        })
        .collect()
}

/// Mean squared error against `v`, per state and summed over states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MseTable {
    pub per_state: Vec<f64>,
    pub summed: f64,
}

/// MSE of a variance series averaged over runs and over the last `window`
/// logged points.
pub fn mse(result: &RunResult, series: Series, truth: &GroundTruth, window: usize) -> Result<MseTable> {
    let len = result.times.len();
    if window == 0 || window > len {
        return Err(Error::Config(format!(
            "MSE window of {window} points for a log of {len} points"
        )));
    }
    let n = result.num_states;
    let mut per_state = vec![0.0; n];
    let mut count = 0usize;
    for run in &result.runs {
        let table = run.series.get(&series).ok_or_else(|| {
            Error::Config(format!("series `{}` was not recorded", series.name()))
        })?;
        for row in &table[len - window..] {
            for s in 0..n {
                per_state[s] += (row[s] - series.truth(truth, s)).powi(2);
            }
        }
        count += window;
    }
    for x in &mut per_state {
        *x /= count as f64;
    }
    Ok(MseTable {
        summed: per_state.iter().sum(),
        per_state,
    })
}

/// MSE over the config's steady-state window.
pub fn steady_state_mse(result: &RunResult, series: Series, truth: &GroundTruth) -> Result<MseTable> {
    let w = result.config.window_points().min(result.times.len());
    mse(result, series, truth, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::run::{assemble, RunLog};
    use crate::experiments::{ExperimentConfig, MdpSource};
    use crate::rng::stream;
    use std::collections::BTreeMap;

    fn constant_result(value: f64, states: usize, times: usize) -> RunResult {
        let table = vec![vec![value; states]; times];
        let run = RunLog {
            series: BTreeMap::from([(Series::Direct, table)]),
            step_sizes: BTreeMap::new(),
            magnitude: UpdateMagnitude::default(),
            steps: 0,
            episodes: 0,
        };
        let cfg = ExperimentConfig::new("c", MdpSource::Complex4, 0.0, 0.0, times - 1);
        assemble(cfg, states, (0..times as u64).collect(), vec![run.clone(), run])
    }

    #[test]
    fn mse_of_exact_estimates_is_zero() {
        let res = constant_result(2.0, 4, 5);
        let truth = GroundTruth::exact(vec![0.0; 4], vec![2.0; 4]);
        let m = mse(&res, Series::Direct, &truth, 3).unwrap();
        assert_eq!(m.summed, 0.0);
    }

    #[test]
    fn mse_of_unit_offset_is_one_per_state() {
        let res = constant_result(3.0, 4, 5);
        let truth = GroundTruth::exact(vec![0.0; 4], vec![2.0; 4]);
        let m = mse(&res, Series::Direct, &truth, 5).unwrap();
        assert_eq!(m.per_state, vec![1.0; 4]);
        assert_eq!(m.summed, 4.0);
        assert!(mse(&res, Series::Direct, &truth, 6).is_err());
        assert!(mse(&res, Series::Vtd, &truth, 1).is_err());
    }

    #[test]
    fn aggregate_uses_population_std() {
        let a = vec![vec![1.0]];
        let b = vec![vec![3.0]];
        let agg = aggregate(&[&a, &b]);
        assert_eq!(agg.mean, vec![vec![2.0]]);
        assert_eq!(agg.std, vec![vec![1.0]]);
    }

    #[test]
    fn zero_error_ratio_leaves_truth() {
        let j = [1.0, -2.0, 3.0];
        assert_eq!(inject_value_error(&j, 0.0, &[5.0, 1.0, 2.0], &mut stream(3)), j.to_vec());
    }

    #[test]
    fn injected_error_is_bounded() {
        let j = [1.0, -2.0, 3.0];
        let v = [0.5, -4.0, 2.0];
        let mut rng = stream(4);
        for _ in 0..10_000 {
            let x = inject_value_error(&j, 0.25, &v, &mut rng);
            assert!(x.iter().zip(&j).all(|(a, b)| (a - b).abs() <= 1.0));
        }
    }
}
