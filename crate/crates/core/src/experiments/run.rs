use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Problem, ValueInit, VarianceInit};
use super::metrics::{aggregate, inject_value_error, Aggregate, UpdateMagnitude};
use crate::error::{Error, Result};
use crate::estimators::{DirectVar, StepSize, ValueTd, VtdEstimator};
use crate::mdp::Sampler;
use crate::oracles::GroundTruth;
use crate::rng::run_stream;

/// A logged per-state time series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Series {
    /// The value table `J`.
    Value,
    /// The VTD second-moment table `M`.
    SecondMoment,
    /// The direct variance table `V`.
    Direct,
    /// The VTD variance read-out `M - J²`.
    Vtd,
}

impl Series {
    pub const ALL: [Series; 4] = [Series::Value, Series::SecondMoment, Series::Direct, Series::Vtd];

    pub fn name(self) -> &'static str {
        match self {
            Series::Value => "value",
            Series::SecondMoment => "second_moment",
            Series::Direct => "direct",
            Series::Vtd => "vtd",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Series::ALL.into_iter().find(|x| x.name() == s)
    }

    /// Whether the series estimates the variance `v`.
    pub fn is_variance(self) -> bool {
        matches!(self, Series::Direct | Series::Vtd)
    }

    /// The ground-truth target of this series in state `s`.
    pub fn truth(self, truth: &GroundTruth, s: usize) -> f64 {
        match self {
            Series::Value => truth.j[s],
            Series::SecondMoment => truth.v[s] + truth.j[s] * truth.j[s],
            Series::Direct | Series::Vtd => truth.v[s],
        }
    }
}

/// `[logged time][state]`.
pub type Table = Vec<Vec<f64>>;

/// Everything recorded in one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLog {
    pub series: BTreeMap<Series, Table>,
    /// Most recent step size used at each state, for learners on ADADELTA.
    pub step_sizes: BTreeMap<Series, Table>,
    pub magnitude: UpdateMagnitude,
    pub steps: u64,
    pub episodes: u64,
}

/// Per-run logs and their cross-run aggregates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub config: ExperimentConfig,
    pub num_states: usize,
    /// Logged times in run units (episodes or timesteps); `0` is the initial state.
    pub times: Vec<u64>,
    pub runs: Vec<RunLog>,
    /// Cross-run mean and population std of every recorded series.
    pub aggregates: BTreeMap<Series, Aggregate>,
    pub step_sizes: BTreeMap<Series, Aggregate>,
    /// Update magnitudes averaged over runs.
    pub magnitude: UpdateMagnitude,
}

impl RunResult {
    pub fn aggregate(&self, series: Series) -> Option<&Aggregate> {
        self.aggregates.get(&series)
    }

    /// Variance series requested by the config.
    pub fn variance_series(&self) -> Vec<Series> {
        let mut out = Vec::new();
        if self.config.estimators.direct() {
            out.push(Series::Direct);
        }
        if self.config.estimators.vtd() {
            out.push(Series::Vtd);
        }
        out
    }

    /// Mean over the last `points` logged times of the cross-run mean.
    pub fn tail_mean(&self, series: Series, s: usize, points: usize) -> f64 {
        let agg = &self.aggregates[&series];
        let k = points.clamp(1, self.times.len());
        let tail = &agg.mean[self.times.len() - k..];
        tail.iter().map(|row| row[s]).sum::<f64>() / k as f64
    }

    /// Mean over the last `points` logged times of the cross-run std.
    pub fn tail_std(&self, series: Series, s: usize, points: usize) -> f64 {
        let agg = &self.aggregates[&series];
        let k = points.clamp(1, self.times.len());
        let tail = &agg.std[self.times.len() - k..];
        tail.iter().map(|row| row[s]).sum::<f64>() / k as f64
    }
}

fn logged_times(cfg: &ExperimentConfig) -> Vec<u64> {
    let mut t: Vec<u64> = (0..=cfg.run_length)
        .step_by(cfg.log_every)
        .map(|x| x as u64)
        .collect();
    if cfg.run_length % cfg.log_every != 0 {
        t.push(cfg.run_length as u64);
    }
    t
}

struct Learners {
    value: ValueTd,
    direct: DirectVar,
    vtd: VtdEstimator,
}

impl Learners {
    fn new<R: Rng + ?Sized>(
        cfg: &ExperimentConfig,
        truth: &GroundTruth,
        n: usize,
        rng: &mut R,
    ) -> Learners {
        let j0 = match cfg.value_init {
            ValueInit::Zero => vec![0.0; n],
            ValueInit::Truth => truth.j.clone(),
            ValueInit::TruthPlusError { err_ratio } => {
                inject_value_error(&truth.j, err_ratio, &truth.v, rng)
            }
        };
        let (v0, m0) = match cfg.variance_init {
            VarianceInit::Zero => (vec![0.0; n], vec![0.0; n]),
            VarianceInit::Truth => (truth.v.clone(), truth.second_moment()),
        };
        let alpha = if cfg.value_frozen {
            StepSize::Constant(0.0)
        } else {
            cfg.alpha.build(n)
        };
        Learners {
            value: ValueTd::new(j0, vec![cfg.kappa; n], alpha),
            direct: DirectVar::new(v0, vec![cfg.kappa_bar; n], cfg.alpha_bar.build(n)),
            vtd: VtdEstimator::new(m0, vec![cfg.kappa_bar; n], cfg.alpha_bar.build(n)),
        }
    }

    fn reset_traces(&mut self) {
        self.value.reset_traces();
        self.direct.reset_traces();
        self.vtd.reset_traces();
    }
}

fn abs_change(before: &[f64], after: &[f64]) -> f64 {
    before.iter().zip(after).map(|(a, b)| (b - a).abs()).sum()
}

fn run_once(cfg: &ExperimentConfig, problem: &Problem, truth: &GroundTruth, run: usize) -> RunLog {
    let mdp = &problem.mdp;
    let n = mdp.num_states();
    let mode = cfg.mode;
    let mut rng = run_stream(cfg.base_seed, run);
    let mut l = Learners::new(cfg, truth, n, &mut rng);
    let mut sampler = Sampler::new(mdp, &problem.behavior, &problem.target, &mut rng);

    let logged: Vec<Series> = {
        let mut s = vec![Series::Value];
        if cfg.estimators.vtd() {
            s.push(Series::SecondMoment);
        }
        if cfg.estimators.direct() {
            s.push(Series::Direct);
        }
        if cfg.estimators.vtd() {
            s.push(Series::Vtd);
        }
        s
    };
    let mut rated: Vec<Series> = Vec::new();
    if cfg.alpha.is_adaptive() && !cfg.value_frozen {
        rated.push(Series::Value);
    }
    if cfg.alpha_bar.is_adaptive() {
        rated.extend([Series::Direct, Series::Vtd]);
    }
    let mut rates: BTreeMap<Series, Vec<f64>> = rated.iter().map(|&s| (s, vec![0.0; n])).collect();

    let mut series: BTreeMap<Series, Table> = logged.iter().map(|&s| (s, Vec::new())).collect();
    let mut step_sizes: BTreeMap<Series, Table> = rated.iter().map(|&s| (s, Vec::new())).collect();
    let mut record = |l: &Learners, rates: &BTreeMap<Series, Vec<f64>>| {
        for (s, table) in series.iter_mut() {
            table.push(match s {
                Series::Value => l.value.j.clone(),
                Series::SecondMoment => l.vtd.m.clone(),
                Series::Direct => l.direct.v.clone(),
                Series::Vtd => l.vtd.variance(&l.value.j),
            });
        }
        for (s, table) in step_sizes.iter_mut() {
            table.push(rates[s].clone());
        }
    };
    record(&l, &rates);

    let times = logged_times(cfg);
    let mut next_log = 1;
    let mut totals = UpdateMagnitude::default();
    let (mut steps, mut episodes) = (0u64, 0u64);
    let mut units = 0usize;
    let mut j_before = vec![0.0; n];
    let mut m_before = vec![0.0; n];
    let mut v_before = vec![0.0; n];
    let mut vtd_before = vec![0.0; n];

    while units < cfg.run_length {
        let t = sampler.next(&mut rng);
        j_before.copy_from_slice(&l.value.j);
        m_before.copy_from_slice(&l.vtd.m);
        v_before.copy_from_slice(&l.direct.v);
        for s in 0..n {
            vtd_before[s] = m_before[s] - j_before[s] * j_before[s];
        }

        let delta = if cfg.value_frozen {
            l.value.td_error(&t)
        } else {
            l.value.step(&t, mode)
        };
        l.direct.step(&t, delta, l.value.j[t.s], mode);
        l.vtd.step(&t, &l.value.j, mode);
        for (s, r) in rates.iter_mut() {
            r[t.s] = match s {
                Series::Value => l.value.last_rate(),
                Series::Direct => l.direct.last_rate(),
                _ => l.vtd.last_rate(),
            };
        }

        totals.value += abs_change(&j_before, &l.value.j);
        totals.second_moment += abs_change(&m_before, &l.vtd.m);
        totals.direct += abs_change(&v_before, &l.direct.v);
        totals.vtd += (0..n)
            .map(|s| (l.vtd.variance_at(&l.value.j, s) - vtd_before[s]).abs())
            .sum::<f64>();

        steps += 1;
        let unit_done = if mdp.episodic {
            if t.episode_boundary {
                episodes += 1;
                l.reset_traces();
                true
            } else {
                false
            }
        } else {
            true
        };
        if unit_done {
            units += 1;
            if next_log < times.len() && units as u64 == times[next_log] {
                record(&l, &rates);
                next_log += 1;
            }
        }
    }
    let denom = units.max(1) as f64;
    RunLog {
        series,
        step_sizes,
        magnitude: UpdateMagnitude {
            value: totals.value / denom,
            second_moment: totals.second_moment / denom,
            vtd: totals.vtd / denom,
            direct: totals.direct / denom,
        },
        steps,
        episodes,
    }
}

/// Runs `cfg.num_runs` independent runs, run `r` on stream `base_seed + r`.
///
/// Per timestep: sample under the behavior policy, update the value (unless
/// frozen), then both variance learners with the value learner's TD error and
/// post-update table. Episodic MDPs reset all traces at each restart.
/// Update magnitudes are total absolute changes over all states, averaged per
/// episode (episodic) or per timestep (continuing).
pub fn run_experiment(cfg: &ExperimentConfig, truth: &GroundTruth) -> Result<RunResult> {
    cfg.validate()?;
    let problem = cfg.problem()?;
    let n = problem.mdp.num_states();
    if truth.num_states() != n || truth.v.len() != n {
        return Err(Error::Config(format!(
            "{}: ground truth has {} states, MDP has {n}",
            cfg.name,
            truth.num_states()
        )));
    }
    let needs_truth = cfg.value_init != ValueInit::Zero || cfg.variance_init != VarianceInit::Zero;
    if needs_truth && (0..n).any(|s| truth.is_missing(s) || truth.j[s].is_nan()) {
        return Err(Error::Config(format!(
            "{}: truth-based initialisation needs ground truth for every state",
            cfg.name
        )));
    }
    let runs: Vec<RunLog> = (0..cfg.num_runs)
        .into_par_iter()
        .map(|r| run_once(cfg, &problem, truth, r))
        .collect();
    Ok(assemble(cfg.clone(), n, logged_times(cfg), runs))
}

/// Cross-run aggregation in run order.
pub(crate) fn assemble(config: ExperimentConfig, num_states: usize, times: Vec<u64>, runs: Vec<RunLog>) -> RunResult {
    let aggregate_of = |pick: &dyn Fn(&RunLog) -> Option<&Table>| -> Option<Aggregate> {
        let tables: Option<Vec<&Table>> = runs.iter().map(pick).collect();
        tables.filter(|t| !t.is_empty()).map(|t| aggregate(&t))
    };
    let mut aggregates = BTreeMap::new();
    let mut step_sizes = BTreeMap::new();
    for s in Series::ALL {
        if let Some(a) = aggregate_of(&|r| r.series.get(&s)) {
            aggregates.insert(s, a);
        }
        if let Some(a) = aggregate_of(&|r| r.step_sizes.get(&s)) {
            step_sizes.insert(s, a);
        }
    }
    let k = runs.len().max(1) as f64;
    let sum = runs.iter().fold(UpdateMagnitude::default(), |acc, r| UpdateMagnitude {
        value: acc.value + r.magnitude.value,
        second_moment: acc.second_moment + r.magnitude.second_moment,
        vtd: acc.vtd + r.magnitude.vtd,
        direct: acc.direct + r.magnitude.direct,
    });
    RunResult {
        config,
        num_states,
        times,
        runs,
        aggregates,
        step_sizes,
        magnitude: UpdateMagnitude {
            value: sum.value / k,
            second_moment: sum.second_moment / k,
            vtd: sum.vtd / k,
            direct: sum.direct / k,
        },
    }
}
