use nalgebra::DMatrix;

use super::GroundTruth;
use crate::error::Result;
use crate::estimators::WeightingMode;
use crate::linalg::{fixed_point_residual, solve_fixed_point};
use crate::mdp::{ensure_valid, Outcome, Policy, TabularMdp};

/// Iterates `(s, a, π(a|s), outcome)` over the support of `policy`.
pub(super) fn support<'a>(
    mdp: &'a TabularMdp,
    policy: &'a Policy,
) -> impl Iterator<Item = (usize, usize, f64, &'a Outcome)> + 'a {
    (0..mdp.num_states()).flat_map(move |s| {
        mdp.actions[s]
            .iter()
            .enumerate()
            .filter(move |(a, _)| policy.probs[s][*a] > 0.0)
            .flat_map(move |(a, act)| {
                let p_a = policy.probs[s][a];
                act.outcomes
                    .iter()
                    .filter(|o| o.prob > 0.0)
                    .map(move |o| (s, a, p_a, o))
            })
    })
}

fn value_system(mdp: &TabularMdp, pi: &Policy) -> (DMatrix<f64>, Vec<f64>) {
    let n = mdp.num_states();
    let mut p = DMatrix::zeros(n, n);
    let mut r = vec![0.0; n];
    for (s, _, p_a, o) in support(mdp, pi) {
        let w = p_a * o.prob;
        p[(s, o.next)] += w * mdp.gamma[o.next];
        r[s] += w * o.reward.mean();
    }
    (p, r)
}

/// Solves `j = r̄ + P_γ j` where `P_γ(s, s') = Σ_a π(a|s) p(s'|s, a) γ(s')`.
pub fn exact_value(mdp: &TabularMdp, pi: &Policy) -> Result<Vec<f64>> {
    ensure_valid(mdp, pi, pi)?;
    let (p, r) = value_system(mdp, pi);
    solve_fixed_point(&p, &r)
}

/// Max-norm Bellman residual of `j`.
pub fn value_residual(mdp: &TabularMdp, pi: &Policy, j: &[f64]) -> f64 {
    let (p, r) = value_system(mdp, pi);
    fixed_point_residual(&p, &r, j)
}

/// `E[δ² | S_t = s]` under `pi` with the TD error taken against `j`.
///
/// Reward noise enters analytically through its variance.
pub fn expected_sq_td_error(mdp: &TabularMdp, pi: &Policy, j: &[f64]) -> Vec<f64> {
    let mut d = vec![0.0; mdp.num_states()];
    for (s, _, p_a, o) in support(mdp, pi) {
        let td = o.reward.mean() + mdp.gamma[o.next] * j[o.next] - j[s];
        d[s] += p_a * o.prob * (td * td + o.reward.variance());
    }
    d
}

fn variance_system(mdp: &TabularMdp, pi: &Policy, j: &[f64]) -> (DMatrix<f64>, Vec<f64>) {
    let n = mdp.num_states();
    let mut p = DMatrix::zeros(n, n);
    for (s, _, p_a, o) in support(mdp, pi) {
        let gl = mdp.gamma[o.next] * mdp.lam[o.next];
        p[(s, o.next)] += p_a * o.prob * gl * gl;
    }
    (p, expected_sq_td_error(mdp, pi, j))
}

/// Solves `v = E[δ²] + P_{γ²λ²} v`, the Bellman equation for the variance of
/// the λ-return when `j` is the true value.
pub fn exact_variance(mdp: &TabularMdp, pi: &Policy, j: &[f64]) -> Result<Vec<f64>> {
    ensure_valid(mdp, pi, pi)?;
    let (p, d) = variance_system(mdp, pi, j);
    solve_fixed_point(&p, &d)
}

/// Max-norm residual of `v` in the on-policy variance equation.
pub fn variance_residual(mdp: &TabularMdp, pi: &Policy, j: &[f64], v: &[f64]) -> f64 {
    let (p, d) = variance_system(mdp, pi, j);
    fixed_point_residual(&p, &d, v)
}

/// Variance of the off-policy λ-return (every step multiplied by ρ) with the
/// expectation taken under the behavior policy `mu`:
///
/// `v(s) = E_μ[(ρδ + (ρ - 1) j(s))² + ρ² γ'² λ'² v(S')]`.
///
/// Fails with [`crate::Error::Divergent`] when the ρ²-weighted operator has
/// spectral radius of at least one.
pub fn exact_variance_offpolicy(
    mdp: &TabularMdp,
    mu: &Policy,
    pi: &Policy,
    j: &[f64],
) -> Result<Vec<f64>> {
    ensure_valid(mdp, pi, mu)?;
    let n = mdp.num_states();
    let mut p = DMatrix::zeros(n, n);
    let mut d = vec![0.0; n];
    for (s, a, mu_a, o) in support(mdp, mu) {
        let rho = pi.probs[s][a] / mu_a;
        let w = mu_a * o.prob;
        let gl = mdp.gamma[o.next] * mdp.lam[o.next];
        let td = o.reward.mean() + mdp.gamma[o.next] * j[o.next] - j[s];
        let c = rho * td + (rho - 1.0) * j[s];
        d[s] += w * (c * c + rho * rho * o.reward.variance());
        p[(s, o.next)] += w * rho * rho * gl * gl;
    }
    solve_fixed_point(&p, &d)
}

/// The variance a learner running in `mode` converges to.
///
/// On-policy and target-variance modes estimate the variance of the target
/// λ-return; return-variance mode estimates the variance of the ρ-weighted
/// return.
pub fn exact_variance_for_mode(
    mdp: &TabularMdp,
    mu: &Policy,
    pi: &Policy,
    j: &[f64],
    mode: WeightingMode,
) -> Result<Vec<f64>> {
    match mode {
        WeightingMode::OnPolicy | WeightingMode::OffPolicyTargetVariance => {
            exact_variance(mdp, pi, j)
        }
        WeightingMode::OffPolicyReturnVariance => exact_variance_offpolicy(mdp, mu, pi, j),
    }
}

/// Linear-solve ground truth for `(mdp, mode)`; `pi` is the target policy.
pub fn ground_truth(
    mdp: &TabularMdp,
    mu: &Policy,
    pi: &Policy,
    mode: WeightingMode,
) -> Result<GroundTruth> {
    let j = exact_value(mdp, pi)?;
    let v = exact_variance_for_mode(mdp, mu, pi, &j, mode)?;
    Ok(GroundTruth::exact(j, v))
}

/// Fixed point of the on-policy second-moment (VTD) learner with a fixed value
/// table `j`:
///
/// `m = E[Ḡ² + 2γ'λ'Ḡ j(S')] + P_{γ²λ²} m`, `Ḡ = R + γ'(1-λ') j(S')`.
///
/// With the true value, `m - j²` equals the variance.
pub fn exact_second_moment(mdp: &TabularMdp, pi: &Policy, j: &[f64]) -> Result<Vec<f64>> {
    ensure_valid(mdp, pi, pi)?;
    let n = mdp.num_states();
    let mut p = DMatrix::zeros(n, n);
    let mut b = vec![0.0; n];
    for (s, _, p_a, o) in support(mdp, pi) {
        let w = p_a * o.prob;
        let (g, l) = (mdp.gamma[o.next], mdp.lam[o.next]);
        let jn = j[o.next];
        let g_bar = o.reward.mean() + g * (1.0 - l) * jn;
        b[s] += w * (g_bar * g_bar + o.reward.variance() + 2.0 * g * l * g_bar * jn);
        p[(s, o.next)] += w * (g * l).powi(2);
    }
    solve_fixed_point(&p, &b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::mdp::{builtin_chain, builtin_complex4, Action, Outcome, Reward};

    const CHAIN_V: [f64; 5] = [2.997541, 2.4661, 1.81, 1.0, 0.0];

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn chain_value_and_variance() {
        let (mdp, _, pi) = builtin_chain();
        let j = exact_value(&mdp, &pi).unwrap();
        assert!(close(&j, &[4.0, 3.0, 2.0, 1.0, 0.0], 1e-12), "{j:?}");
        assert!(value_residual(&mdp, &pi, &j) <= 1e-9);
        let v = exact_variance(&mdp, &pi, &j).unwrap();
        assert!(close(&v, &CHAIN_V, 1e-12), "{v:?}");
        assert!(variance_residual(&mdp, &pi, &j, &v) <= 1e-9);
    }

    #[test]
    fn second_moment_fixed_point_matches_variance_at_truth() {
        for (mdp, mu, _) in [builtin_chain(), builtin_complex4()] {
            let j = exact_value(&mdp, &mu).unwrap();
            let v = exact_variance(&mdp, &mu, &j).unwrap();
            let m = exact_second_moment(&mdp, &mu, &j).unwrap();
            for s in 0..j.len() {
                assert!((m[s] - j[s] * j[s] - v[s]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn chain_variance_at_lambda_extremes() {
        let (mdp, _, pi) = builtin_chain();
        let j = exact_value(&mdp, &pi).unwrap();
        let v0 = exact_variance(&mdp.with_lambda(0.0), &pi, &j).unwrap();
        assert!(close(&v0, &[1.0, 1.0, 1.0, 1.0, 0.0], 1e-12));
        let v1 = exact_variance(&mdp.with_lambda(1.0), &pi, &j).unwrap();
        assert!(close(&v1, &[4.0, 3.0, 2.0, 1.0, 0.0], 1e-12));
    }

    #[test]
    fn zero_rewards_give_zero_value() {
        let (mdp, mu, _) = builtin_complex4();
        let j = exact_value(&mdp.with_constant_rewards(0.0), &mu).unwrap();
        assert!(j.iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn squared_td_error_on_chain() {
        let (mdp, _, pi) = builtin_chain();
        let d = expected_sq_td_error(&mdp, &pi, &[4.0, 3.0, 2.0, 1.0, 0.0]);
        assert!(close(&d[..4], &[1.0; 4], 1e-12));
        // Perturb state 2 by +1.
        let d = expected_sq_td_error(&mdp, &pi, &[4.0, 3.0, 3.0, 1.0, 0.0]);
        assert!((d[1] - 2.0).abs() < 1e-12);
        assert!((d[2] - 2.0).abs() < 1e-12);
        // A +2 shift moves the mean TD error by ±2 on both sides.
        let d = expected_sq_td_error(&mdp, &pi, &[4.0, 3.0, 4.0, 1.0, 0.0]);
        assert!((d[1] - 5.0).abs() < 1e-12);
        assert!((d[2] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_problem_has_zero_td_error_at_fixed_point() {
        let (mdp, mu, _) = builtin_complex4();
        let det = mdp.with_deterministic_rewards();
        // Deterministic transitions too: keep only the first outcome of each action.
        let mut det = det;
        for acts in &mut det.actions {
            for act in acts {
                let mut o = act.outcomes[0].clone();
                o.prob = 1.0;
                act.outcomes = vec![o];
            }
        }
        let mu_det = Policy {
            probs: vec![vec![1.0, 0.0]; mu.probs.len()],
        };
        let j = exact_value(&det, &mu_det).unwrap();
        let d = expected_sq_td_error(&det, &mu_det, &j);
        assert!(d.iter().all(|x| x.abs() < 1e-20), "{d:?}");
    }

    #[test]
    fn lambda_zero_variance_is_squared_td_error() {
        let (mdp, mu, _) = builtin_complex4();
        let mdp = mdp.with_lambda(0.0);
        let j = exact_value(&mdp, &mu).unwrap();
        let v = exact_variance(&mdp, &mu, &j).unwrap();
        let d = expected_sq_td_error(&mdp, &mu, &j);
        assert!(close(&v, &d, 1e-12));
    }

    #[test]
    fn offpolicy_reduces_to_onpolicy() {
        let (mdp, mu, _) = builtin_complex4();
        let j = exact_value(&mdp, &mu).unwrap();
        let on = exact_variance(&mdp, &mu, &j).unwrap();
        let off = exact_variance_offpolicy(&mdp, &mu, &mu, &j).unwrap();
        assert!(close(&on, &off, 1e-12));
    }

    #[test]
    fn variance_is_nonnegative_on_builtins() {
        let (mdp, mu, pi) = builtin_complex4();
        for mode in [
            WeightingMode::OnPolicy,
            WeightingMode::OffPolicyTargetVariance,
            WeightingMode::OffPolicyReturnVariance,
        ] {
            let target = if mode == WeightingMode::OnPolicy { &mu } else { &pi };
            let gt = ground_truth(&mdp, &mu, target, mode).unwrap();
            assert!(gt.v.iter().all(|&x| x >= -1e-9), "{mode:?}: {:?}", gt.v);
        }
    }

    #[test]
    fn divergent_offpolicy_variance_is_reported() {
        // One state, two actions, continuing with γλ = 0.9.
        let act = |r| Action {
            outcomes: vec![Outcome {
                next: 0,
                prob: 1.0,
                reward: Reward::Constant(r),
            }],
        };
        let mdp = TabularMdp {
            actions: vec![vec![act(1.0), act(0.0)]],
            gamma: vec![0.9],
            lam: vec![1.0],
            start: vec![1.0],
            episodic: false,
        };
        let mu = Policy {
            probs: vec![vec![0.1, 0.9]],
        };
        let pi = Policy {
            probs: vec![vec![0.9, 0.1]],
        };
        // Σ_a π²/μ · γ²λ² = (8.1 + 0.0111) · 0.81 > 1.
        let j = exact_value(&mdp, &pi).unwrap();
        assert!(matches!(
            exact_variance_offpolicy(&mdp, &mu, &pi, &j),
            Err(Error::Divergent)
        ));
    }

    #[test]
    fn assumption_violation_is_an_error() {
        let (mut mdp, _, pi) = builtin_chain();
        mdp.gamma = vec![1.0; 5];
        assert!(matches!(exact_value(&mdp, &pi), Err(Error::InvalidMdp(_))));
    }
}
