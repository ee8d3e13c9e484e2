use super::brute_force::{brute_force_variance, BruteForce};
use super::exact::{exact_value, support};
use crate::error::{Error, Result};
use crate::mdp::{ensure_valid, Policy, TabularMdp};

/// Absolute slack for floating-point error on top of the brute-force truncation.
const TOLERANCE: f64 = 1e-9;

/// Per-state outcome of checking the variance Bellman residual under an
/// approximate value table.
#[derive(Debug, Clone, PartialEq)]
pub struct Theorem1Check {
    pub state: usize,
    /// Both `(J - j)² ≤ ε` and `|covariance| ≤ ε` hold.
    pub premises_hold: bool,
    /// `(J(s) - j(s))²`.
    pub value_gap: f64,
    /// `E[γ'λ' δ (j(S') - J(S')) | s]` with δ computed from `J`.
    pub covariance: f64,
    /// `V(s)`, the variance of the λ-return bootstrapped on `J`.
    pub lhs: f64,
    /// `E[δ² + γ'²λ'² V(S') | s]`.
    pub rhs: f64,
    pub difference: f64,
    /// `3 ε(s)`.
    pub bound: f64,
    /// `bound - |difference|`; negative means the bound is violated.
    pub slack: f64,
    /// Premises fail, or the bound holds up to truncation and rounding error.
    pub pass: bool,
}

fn gap_and_covariance(mdp: &TabularMdp, pi: &Policy, j: &[f64], j_approx: &[f64]) -> Vec<(f64, f64)> {
    let n = mdp.num_states();
    let mut cov = vec![0.0; n];
    for (s, _, pa, o) in support(mdp, pi) {
        let g = mdp.gamma[o.next];
        let mean_delta = o.reward.mean() + g * j_approx[o.next] - j_approx[s];
        cov[s] += pa * o.prob * g * mdp.lam[o.next] * mean_delta * (j[o.next] - j_approx[o.next]);
    }
    (0..n)
        .map(|s| ((j_approx[s] - j[s]).powi(2), cov[s]))
        .collect()
}

/// The smallest ε satisfying both premises: `max((J - j)², |covariance|)`.
pub fn theorem1_epsilon(mdp: &TabularMdp, pi: &Policy, j_approx: &[f64]) -> Result<Vec<f64>> {
    let j = exact_value(mdp, pi)?;
    Ok(gap_and_covariance(mdp, pi, &j, j_approx)
        .into_iter()
        .map(|(gap, cov)| gap.max(cov.abs()))
        .collect())
}

/// Brute force with increasing depth until the truncation bound is negligible
/// or the path budget runs out.
fn converged_brute_force(mdp: &TabularMdp, pi: &Policy, j: &[f64]) -> Result<BruteForce> {
    let mut depth = 4;
    let mut best = brute_force_variance(mdp, pi, j, depth)?;
    while best.truncation_bound.iter().any(|&b| b > 1e-12) {
        depth *= 2;
        match brute_force_variance(mdp, pi, j, depth) {
            Ok(bf) => best = bf,
            Err(Error::PathBudget { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(best)
}

/// Checks `|V(s) - E[δ² + γ'²λ'²V(S')]| ≤ 3ε(s)` for every state, where `V`
/// is the exact variance of the λ-return bootstrapped on `j_approx` and δ uses
/// `j_approx`. Both sides are computed by exhaustive enumeration.
pub fn verify_theorem1_bound(
    mdp: &TabularMdp,
    pi: &Policy,
    j_approx: &[f64],
    epsilon: &[f64],
) -> Result<Vec<Theorem1Check>> {
    ensure_valid(mdp, pi, pi)?;
    let n = mdp.num_states();
    if j_approx.len() != n || epsilon.len() != n {
        return Err(Error::Config(format!(
            "expected {n} entries for value table and epsilon"
        )));
    }
    let j = exact_value(mdp, pi)?;
    let premises = gap_and_covariance(mdp, pi, &j, j_approx);
    let bf = converged_brute_force(mdp, pi, j_approx)?;

    let mut rhs = vec![0.0; n];
    let mut rhs_slack = vec![0.0; n];
    for (s, _, pa, o) in support(mdp, pi) {
        let p = pa * o.prob;
        let g = mdp.gamma[o.next];
        let meta = (g * mdp.lam[o.next]).powi(2);
        let mean_delta = o.reward.mean() + g * j_approx[o.next] - j_approx[s];
        rhs[s] += p * (mean_delta * mean_delta + o.reward.variance() + meta * bf.variance[o.next]);
        rhs_slack[s] += p * meta * bf.truncation_bound[o.next];
    }

    Ok((0..n)
        .map(|s| {
            let (value_gap, covariance) = premises[s];
            let premises_hold = value_gap <= epsilon[s] && covariance.abs() <= epsilon[s];
            let lhs = bf.variance[s];
            let difference = lhs - rhs[s];
            let bound = 3.0 * epsilon[s];
            let allowance = bf.truncation_bound[s] + rhs_slack[s] + TOLERANCE;
            let slack = bound - difference.abs();
            Theorem1Check {
                state: s,
                premises_hold,
                value_gap,
                covariance,
                lhs,
                rhs: rhs[s],
                difference,
                bound,
                slack,
                pass: !premises_hold || slack >= -allowance,
            }
        })
        .collect())
}
