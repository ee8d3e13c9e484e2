use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, StepRule};
use super::metrics::{steady_state_mse, MseTable};
use super::run::{run_experiment, Series};
use crate::error::{Error, Result};
use crate::oracles::GroundTruth;

/// Steady-state statistics of one `(α, ᾱ)` grid cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub alpha: f64,
    pub alpha_bar: f64,
    pub mse: BTreeMap<Series, MseTable>,
    /// Per-state steady-state mean estimate (over runs and window).
    pub mean: BTreeMap<Series, Vec<f64>>,
    /// Per-state steady-state cross-run std, averaged over the window.
    pub std: BTreeMap<Series, Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub alphas: Vec<f64>,
    pub alpha_bars: Vec<f64>,
    /// Row-major over `alphas × alpha_bars`.
    pub cells: Vec<SweepCell>,
}

/// The selected cell for one state (or for the summed MSE).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestStep {
    pub cell: usize,
    pub alpha: f64,
    pub alpha_bar: f64,
    pub mse: f64,
}

impl SweepResult {
    pub fn cell(&self, alpha: usize, alpha_bar: usize) -> &SweepCell {
        &self.cells[alpha * self.alpha_bars.len() + alpha_bar]
    }

    fn best_by(&self, key: impl Fn(&SweepCell) -> f64) -> BestStep {
        // Ties go to the smaller ᾱ, then the smaller α.
        let mut order: Vec<usize> = (0..self.cells.len()).collect();
        order.sort_by(|&a, &b| {
            let (ca, cb) = (&self.cells[a], &self.cells[b]);
            ca.alpha_bar
                .total_cmp(&cb.alpha_bar)
                .then(ca.alpha.total_cmp(&cb.alpha))
        });
        let mut best = order[0];
        for &i in &order[1..] {
            if key(&self.cells[i]) < key(&self.cells[best]) {
                best = i;
            }
        }
        let c = &self.cells[best];
        BestStep {
            cell: best,
            alpha: c.alpha,
            alpha_bar: c.alpha_bar,
            mse: key(c),
        }
    }

    /// Per state, the cell with the lowest MSE for that state.
    pub fn best_per_state(&self, series: Series) -> Vec<BestStep> {
        let n = self.cells[0].mse[&series].per_state.len();
        (0..n)
            .map(|s| self.best_by(|c| c.mse[&series].per_state[s]))
            .collect()
    }

    /// The cell with the lowest summed MSE.
    pub fn best_summed(&self, series: Series) -> BestStep {
        self.best_by(|c| c.mse[&series].summed)
    }
}

/// Runs `base` once per `(α, ᾱ)` pair and records steady-state MSE and mean
/// estimates of each requested variance estimator.
pub fn sweep_step_sizes(
    base: &ExperimentConfig,
    alphas: &[f64],
    alpha_bars: &[f64],
    truth: &GroundTruth,
) -> Result<SweepResult> {
    if alphas.is_empty() || alpha_bars.is_empty() {
        return Err(Error::Config("step-size grid must be nonempty".into()));
    }
    let mut cells = Vec::with_capacity(alphas.len() * alpha_bars.len());
    for &alpha in alphas {
        for &alpha_bar in alpha_bars {
            let mut cfg = base.clone();
            cfg.alpha = StepRule::Constant(alpha);
            cfg.alpha_bar = StepRule::Constant(alpha_bar);
            cfg.name = format!("{}[a={alpha},ab={alpha_bar}]", base.name);
            let res = run_experiment(&cfg, truth)?;
            let points = cfg.window_points().min(res.times.len());
            let mut cell = SweepCell {
                alpha,
                alpha_bar,
                mse: BTreeMap::new(),
                mean: BTreeMap::new(),
                std: BTreeMap::new(),
            };
            for series in res.variance_series() {
                cell.mse.insert(series, steady_state_mse(&res, series, truth)?);
                let n = res.num_states;
                cell.mean.insert(series, (0..n).map(|s| res.tail_mean(series, s, points)).collect());
                cell.std.insert(series, (0..n).map(|s| res.tail_std(series, s, points)).collect());
            }
            cells.push(cell);
        }
    }
    Ok(SweepResult {
        alphas: alphas.to_vec(),
        alpha_bars: alpha_bars.to_vec(),
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{mse, MdpSource};

    #[test]
    fn degenerate_grid_matches_a_single_run() {
        let mut cfg = ExperimentConfig::new("g", MdpSource::Chain, 0.01, 0.01, 200);
        cfg.num_runs = 4;
        cfg.steady_state_window = Some(50);
        let truth = cfg.truth().unwrap();
        let sweep = sweep_step_sizes(&cfg, &[0.01], &[0.01], &truth).unwrap();
        let res = run_experiment(&cfg, &truth).unwrap();
        for series in [Series::Direct, Series::Vtd] {
            let direct = mse(&res, series, &truth, 50).unwrap();
            assert_eq!(sweep.cells[0].mse[&series], direct);
        }
    }

    #[test]
    fn ties_prefer_the_smaller_variance_step() {
        let table = |x: f64| MseTable { per_state: vec![x], summed: x };
        let cell = |ab: f64, m: f64| SweepCell {
            alpha: 0.0,
            alpha_bar: ab,
            mse: BTreeMap::from([(Series::Direct, table(m))]),
            mean: BTreeMap::new(),
            std: BTreeMap::new(),
        };
        let sweep = SweepResult {
            alphas: vec![0.0],
            alpha_bars: vec![0.05, 0.01, 0.001],
            cells: vec![cell(0.05, 1.0), cell(0.01, 1.0), cell(0.001, 2.0)],
        };
        assert_eq!(sweep.best_summed(Series::Direct).alpha_bar, 0.01);
        assert_eq!(sweep.best_per_state(Series::Direct)[0].cell, 1);
    }
}
