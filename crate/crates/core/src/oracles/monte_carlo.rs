use rand::Rng;

use super::{GroundTruth, Method};
use crate::error::{Error, Result};
use crate::estimators::WeightingMode;
use crate::mdp::{ensure_valid, Policy, Sampler, TabularMdp, TransitionSample};

/// Number of contiguous batches used for batch-means standard errors.
const BATCHES: usize = 32;

/// Sampled λ-returns along one long behavior trajectory.
struct Returns {
    /// `G_t` for each step (ρ-weighted in return-variance mode).
    g: Vec<f64>,
    /// Importance weight of `G_t` (target-variance mode only, else 1).
    w: Vec<f64>,
    /// True when the part of `G_t` bootstrapped at the end of the trajectory
    /// carries a γλ product below the horizon cutoff.
    complete: Vec<bool>,
}

fn simulate<R: Rng + ?Sized>(
    mdp: &TabularMdp,
    mu: &Policy,
    pi: &Policy,
    total_steps: usize,
    rng: &mut R,
) -> Vec<TransitionSample> {
    let mut sampler = Sampler::new(mdp, mu, pi, rng);
    (0..total_steps).map(|_| sampler.next(rng)).collect()
}

/// Backward recursion `G_t = R + γ'(1-λ')j(S') + γ'λ' G_{t+1}`, with the
/// trajectory tail bootstrapped on `j`.
fn lambda_returns(
    traj: &[TransitionSample],
    j: &[f64],
    mode: WeightingMode,
    horizon_cutoff: f64,
) -> Returns {
    let n = traj.len();
    let mut g = vec![0.0; n];
    let mut w = vec![1.0; n];
    let mut complete = vec![false; n];
    let Some(last) = traj.last() else {
        return Returns { g, w, complete };
    };
    let mut g_next = j[last.s_next];
    let mut w_next = 1.0;
    let mut tail = 1.0;
    for t in (0..n).rev() {
        let x = &traj[t];
        let c = x.gamma_next * x.lam_next;
        let base = x.r + x.gamma_next * (1.0 - x.lam_next) * j[x.s_next];
        let (gt, wt) = match mode {
            WeightingMode::OnPolicy => (base + c * g_next, 1.0),
            WeightingMode::OffPolicyReturnVariance => (x.rho * (base + c * g_next), 1.0),
            WeightingMode::OffPolicyTargetVariance => {
                let carried = if c > 0.0 { w_next } else { 1.0 };
                (base + c * g_next, x.rho * carried)
            }
        };
        tail *= c;
        g[t] = gt;
        w[t] = wt;
        complete[t] = tail < horizon_cutoff;
        g_next = gt;
        w_next = wt;
        // Episode restarts break the link to the following sample; c is
        // already zero there since the terminal state has γ = 0.
    }
    Returns { g, w, complete }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanWithError {
    pub mean: f64,
    pub std_err: f64,
    pub count: usize,
}

fn batch_se(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return f64::NAN;
    }
    let b = BATCHES.min(n);
    let means: Vec<f64> = (0..b)
        .map(|k| {
            let lo = k * n / b;
            let hi = (k + 1) * n / b;
            values[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect();
    let m = means.iter().sum::<f64>() / b as f64;
    let var = means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (b - 1) as f64;
    (var / b as f64).sqrt()
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Monte Carlo estimates of the mean and variance of the λ-return from each
/// state, simulated for `total_steps` steps under `mu`.
///
/// The λ-return bootstraps on `j`. In [`WeightingMode::OffPolicyReturnVariance`]
/// every step is multiplied by ρ; in [`WeightingMode::OffPolicyTargetVariance`]
/// target-policy returns are reweighted by the product of ρ over the steps
/// they depend on. A sample is used only if the γλ weight of its bootstrapped
/// trajectory tail is below `horizon_cutoff`. Standard errors use batch means
/// over each state's samples in time order, which accounts for the overlap of
/// returns from nearby timesteps.
pub fn monte_carlo_moments<R: Rng + ?Sized>(
    mdp: &TabularMdp,
    mu: &Policy,
    pi: &Policy,
    j: &[f64],
    mode: WeightingMode,
    total_steps: usize,
    horizon_cutoff: f64,
    rng: &mut R,
) -> Result<GroundTruth> {
    if total_steps == 0 {
        return Err(Error::Config("Monte Carlo needs at least one step".into()));
    }
    if !(horizon_cutoff > 0.0 && horizon_cutoff < 1.0) {
        return Err(Error::Config(format!(
            "horizon cutoff {horizon_cutoff} is not in (0, 1)"
        )));
    }
    ensure_valid(mdp, pi, mu)?;
    let n = mdp.num_states();
    let traj = simulate(mdp, mu, pi, total_steps, rng);
    let ret = lambda_returns(&traj, j, mode, horizon_cutoff);

    let mut per_state: Vec<Vec<(f64, f64)>> = vec![Vec::new(); n];
    for (t, x) in traj.iter().enumerate() {
        if ret.complete[t] {
            per_state[x.s].push((ret.g[t], ret.w[t]));
        }
    }

    let mut gt = GroundTruth {
        j: vec![f64::NAN; n],
        v: vec![f64::NAN; n],
        method: Method::MonteCarlo,
        std_err: vec![f64::NAN; n],
        j_std_err: vec![f64::NAN; n],
        samples: vec![0; n],
    };
    for (s, xs) in per_state.iter().enumerate() {
        gt.samples[s] = xs.len() as u64;
        if xs.is_empty() {
            continue;
        }
        let weighted: Vec<f64> = xs.iter().map(|(g, w)| g * w).collect();
        let m = mean(&weighted);
        let sq: Vec<f64> = xs.iter().map(|(g, w)| w * (g - m).powi(2)).collect();
        let count = xs.len() as f64;
        // Bessel correction for the plain sample variance.
        let correction = if mode == WeightingMode::OffPolicyTargetVariance || count < 2.0 {
            1.0
        } else {
            count / (count - 1.0)
        };
        gt.j[s] = m;
        gt.j_std_err[s] = batch_se(&weighted);
        gt.v[s] = mean(&sq) * correction;
        gt.std_err[s] = batch_se(&sq) * correction;
    }
    Ok(gt)
}

/// Test function `b(S_t, A_t, R_{t+1}, S_{t+1})` for [`lemma1_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LemmaWeight {
    One,
    Delta,
    DiscountedDelta,
}

/// Empirical mean of `b_t · (G_{t+1} - j(S_{t+1}))` along an on-policy
/// trajectory, where `G_{t+1}` is the λ-return from the next state. It is
/// zero in expectation when `j` is the true value.
pub fn lemma1_check<R: Rng + ?Sized>(
    mdp: &TabularMdp,
    pi: &Policy,
    j: &[f64],
    weight: LemmaWeight,
    total_steps: usize,
    horizon_cutoff: f64,
    rng: &mut R,
) -> Result<MeanWithError> {
    ensure_valid(mdp, pi, pi)?;
    let traj = simulate(mdp, pi, pi, total_steps + 1, rng);
    let ret = lambda_returns(&traj, j, WeightingMode::OnPolicy, horizon_cutoff);
    let mut terms = Vec::with_capacity(total_steps);
    for t in 0..total_steps {
        let x = &traj[t];
        let follow = if x.episode_boundary {
            0.0
        } else if ret.complete[t + 1] {
            ret.g[t + 1] - j[x.s_next]
        } else {
            continue;
        };
        let delta = x.r + x.gamma_next * j[x.s_next] - j[x.s];
        let b = match weight {
            LemmaWeight::One => 1.0,
            LemmaWeight::Delta => delta,
            LemmaWeight::DiscountedDelta => x.gamma_next * x.lam_next * delta,
        };
        terms.push(b * follow);
    }
    Ok(MeanWithError {
        mean: mean(&terms),
        std_err: batch_se(&terms),
        count: terms.len(),
    })
}
