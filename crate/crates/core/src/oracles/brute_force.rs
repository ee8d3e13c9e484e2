use crate::error::{Error, Result};
use crate::mdp::{Policy, TabularMdp};

/// Maximum number of trajectory prefixes expanded per start state.
pub const PATH_BUDGET: usize = 2_000_000;

/// Exact moments of the depth-truncated λ-return from each start state.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForce {
    pub mean: Vec<f64>,
    pub second_moment: Vec<f64>,
    pub variance: Vec<f64>,
    /// `E[c_D²]`, where `c_D` is the product of γλ over the `max_depth` steps
    /// (zero once a path has stopped bootstrapping).
    pub residual: Vec<f64>,
    /// Bound on `|v - variance|` from the untruncated tail; exact for value
    /// tables that satisfy the Bellman equation. Infinite when the residual
    /// does not contract.
    pub truncation_bound: Vec<f64>,
    /// Prefixes expanded, summed over start states.
    pub paths: usize,
}

struct Leaf {
    prob: f64,
    mean: f64,
    reward_var: f64,
}

/// Enumerates every trajectory prefix of up to `max_depth` steps under `pi`
/// and computes the exact distribution moments of the λ-return bootstrapped on
/// `j`, truncated at depth `max_depth` by bootstrapping the remaining tail with
/// `j`. Normal reward noise is integrated analytically.
pub fn brute_force_variance(
    mdp: &TabularMdp,
    pi: &Policy,
    j: &[f64],
    max_depth: usize,
) -> Result<BruteForce> {
    let n = mdp.num_states();
    let mut out = BruteForce {
        mean: vec![0.0; n],
        second_moment: vec![0.0; n],
        variance: vec![0.0; n],
        residual: vec![0.0; n],
        truncation_bound: vec![0.0; n],
        paths: 0,
    };
    for s0 in 0..n {
        let mut leaves = Vec::new();
        let mut expanded = 0usize;
        // (state, depth, prob, c, mean so far, reward variance so far)
        let mut stack = vec![(s0, 0usize, 1.0f64, 1.0f64, 0.0f64, 0.0f64)];
        while let Some((s, depth, prob, c, mean, rvar)) = stack.pop() {
            if depth == max_depth || c == 0.0 {
                let tail = if c == 0.0 { 0.0 } else { c * j[s] };
                leaves.push(Leaf {
                    prob,
                    mean: mean + tail,
                    reward_var: rvar,
                });
                out.residual[s0] += prob * c * c;
                continue;
            }
            for (a, act) in mdp.actions[s].iter().enumerate() {
                let pa = pi.probs[s][a];
                if pa <= 0.0 {
                    continue;
                }
                for o in act.outcomes.iter().filter(|o| o.prob > 0.0) {
                    expanded += 1;
                    if expanded > PATH_BUDGET {
                        return Err(Error::PathBudget {
                            budget: PATH_BUDGET,
                        });
                    }
                    let g = mdp.gamma[o.next];
                    let l = mdp.lam[o.next];
                    let step_mean = o.reward.mean() + g * (1.0 - l) * j[o.next];
                    stack.push((
                        o.next,
                        depth + 1,
                        prob * pa * o.prob,
                        c * g * l,
                        mean + c * step_mean,
                        rvar + c * c * o.reward.variance(),
                    ));
                }
            }
        }
        out.paths += expanded;
        let m: f64 = leaves.iter().map(|l| l.prob * l.mean).sum();
        let var: f64 = leaves
            .iter()
            .map(|l| l.prob * ((l.mean - m).powi(2) + l.reward_var))
            .sum();
        out.mean[s0] = m;
        out.variance[s0] = var;
        out.second_moment[s0] = var + m * m;
    }
    let r = out.residual.iter().copied().fold(0.0, f64::max);
    if r > 0.0 {
        let vmax = out.variance.iter().copied().fold(0.0, f64::max);
        for s in 0..n {
            out.truncation_bound[s] = if r < 1.0 {
                out.residual[s] * vmax / (1.0 - r)
            } else {
                f64::INFINITY
            };
        }
    }
    Ok(out)
}
