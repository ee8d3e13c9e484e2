use lambda_variance::estimators::{
    vtd_meta_reward, vtd_meta_reward_squared_form, DirectVar, StepSize, Trace, ValueTd, VtdEstimator, WeightingMode,
};
use lambda_variance::mdp::{Action, Outcome, Policy, Reward, TabularMdp, TransitionSample};
use lambda_variance::oracles::{brute_force_variance, exact_second_moment, exact_value, exact_variance, exact_variance_offpolicy, value_residual, variance_residual};
use proptest::prelude::*;

fn transition(s: usize, s_next: usize, r: f64, gamma_next: f64, lam_next: f64, rho: f64) -> TransitionSample {
    TransitionSample {
        s,
        a: 0,
        r,
        s_next,
        rho,
        gamma_next,
        lam_next,
        episode_boundary: false,
    }
}

fn normalise(w: Vec<f64>) -> Vec<f64> {
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Continuing MDPs with up to three states, two actions and two outcomes per action.
fn small_mdp() -> impl Strategy<Value = (TabularMdp, Policy, Policy)> {
    (2usize..=3).prop_flat_map(|n| {
        let action = (
            prop::collection::vec((0..n, 0.1f64..1.0, -2.0f64..2.0, 0.0f64..1.0), 1..=2),
        );
        let state = prop::collection::vec(action, 1..=2);
        (
            prop::collection::vec(state, n),
            prop::collection::vec(0.0f64..0.85, n),
            prop::collection::vec(0.0f64..=1.0, n),
            prop::collection::vec(prop::collection::vec(0.1f64..1.0, 2), n),
            prop::collection::vec(prop::collection::vec(0.1f64..1.0, 2), n),
        )
            .prop_map(move |(states, gamma, lam, pw, mw)| {
                let actions: Vec<Vec<Action>> = states
                    .into_iter()
                    .map(|acts| {
                        acts.into_iter()
                            .map(|(outs,)| {
                                let probs = normalise(outs.iter().map(|o| o.1).collect());
                                Action {
                                    outcomes: outs
                                        .iter()
                                        .zip(probs)
                                        .map(|(&(next, _, mean, var), prob)| Outcome {
                                            next,
                                            prob,
                                            reward: Reward::Normal { mean, var },
                                        })
                                        .collect(),
                                }
                            })
                            .collect()
                    })
                    .collect();
                let policy = |w: &[Vec<f64>]| Policy {
                    probs: actions
                        .iter()
                        .zip(w)
                        .map(|(a, w)| normalise(w[..a.len()].to_vec()))
                        .collect(),
                };
                let pi = policy(&pw);
                let mu = policy(&mw);
                let mdp = TabularMdp {
                    actions,
                    gamma,
                    lam,
                    start: vec![1.0 / n as f64; n],
                    episodic: false,
                };
                (mdp, mu, pi)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_variance_matches_enumeration((mdp, _, pi) in small_mdp()) {
        let j = exact_value(&mdp, &pi).unwrap();
        prop_assert!(value_residual(&mdp, &pi, &j) < 1e-10);
        let v = exact_variance(&mdp, &pi, &j).unwrap();
        prop_assert!(variance_residual(&mdp, &pi, &j, &v) < 1e-10);
        let bf = brute_force_variance(&mdp, &pi, &j, 8).unwrap();
        for s in 0..j.len() {
            prop_assert!(v[s] >= -1e-12);
            prop_assert!(bf.truncation_bound[s].is_finite());
            prop_assert!((bf.variance[s] - v[s]).abs() <= bf.truncation_bound[s] + 1e-9,
                "state {s}: exact {} brute {} bound {}", v[s], bf.variance[s], bf.truncation_bound[s]);
        }
    }

    #[test]
    fn second_moment_fixed_point_gives_variance((mdp, _, pi) in small_mdp()) {
        let j = exact_value(&mdp, &pi).unwrap();
        let v = exact_variance(&mdp, &pi, &j).unwrap();
        let m = exact_second_moment(&mdp, &pi, &j).unwrap();
        for s in 0..j.len() {
            prop_assert!((m[s] - j[s] * j[s] - v[s]).abs() < 1e-8 * (1.0 + m[s].abs()));
        }
    }

    #[test]
    fn return_variance_reduces_on_policy((mdp, _, pi) in small_mdp()) {
        let j = exact_value(&mdp, &pi).unwrap();
        let on = exact_variance(&mdp, &pi, &j).unwrap();
        let off = exact_variance_offpolicy(&mdp, &pi, &pi, &j).unwrap();
        for s in 0..j.len() {
            prop_assert!((on[s] - off[s]).abs() < 1e-9 * (1.0 + on[s]));
        }
    }

    #[test]
    fn direct_estimate_stays_nonnegative(
        alpha_bar in 1e-6f64..=1.0,
        v0 in prop::collection::vec(0.0f64..10.0, 4),
        steps in prop::collection::vec((0usize..4, 0usize..4, -5.0f64..5.0, 0.0f64..=1.0, 0.0f64..=1.0, -5.0f64..5.0), 1..200),
    ) {
        let mut d = DirectVar::new(v0, vec![0.0; 4], StepSize::Constant(alpha_bar));
        for (s, sn, r, g, l, delta) in steps {
            d.step(&transition(s, sn, r, g, l, 1.0), delta, 0.0, WeightingMode::OnPolicy);
            prop_assert!(d.v.iter().all(|&x| x >= 0.0), "{:?}", d.v);
        }
    }

    #[test]
    fn vtd_meta_reward_forms_agree(r in -10.0f64..10.0, g in 0.0f64..=1.0, l in 0.0f64..=1.0, j in -10.0f64..10.0) {
        let a = vtd_meta_reward(r, g, l, j, 1.0);
        let b = vtd_meta_reward_squared_form(r, g, l, j);
        let scale = 1.0 + (r.abs() + j.abs()).powi(2);
        prop_assert!((a - b).abs() <= 1e-12 * scale);
    }

    #[test]
    fn direct_meta_reward_is_squared_td_error_on_policy(delta in -1e3f64..1e3, j in -1e3f64..1e3) {
        prop_assert_eq!(DirectVar::meta_reward(delta, j, 1.0), delta * delta);
    }

    #[test]
    fn equal_step_vtd_identity(
        j0 in prop::collection::vec(-3.0f64..3.0, 3),
        m0 in prop::collection::vec(0.0f64..20.0, 3),
        alpha in 1e-4f64..0.5,
        r in -3.0f64..3.0,
        g in 0.0f64..=1.0,
        l in 0.0f64..=1.0,
        sn in 1usize..3,
    ) {
        let t = transition(0, sn, r, g, l, 1.0);
        let mut value = ValueTd::new(j0.clone(), vec![0.0; 3], StepSize::Constant(alpha));
        let mut vtd = VtdEstimator::new(m0, vec![0.0; 3], StepSize::Constant(alpha));
        let v_before = vtd.variance(&value.j);
        let delta = value.step(&t, WeightingMode::OnPolicy);
        vtd.step(&t, &value.j, WeightingMode::OnPolicy);
        let dv = vtd.variance_at(&value.j, 0) - v_before[0];
        let gbar = (g * l).powi(2);
        let expected = alpha * (delta * delta + gbar * v_before[sn] - v_before[0]) - (alpha * delta).powi(2);
        prop_assert!((dv - expected).abs() <= 1e-10 * (1.0 + dv.abs()), "{dv} vs {expected}");
    }

    #[test]
    fn off_policy_modes_reduce_when_rho_is_one(
        s in 0usize..3, sn in 0usize..3, r in -3.0f64..3.0, g in 0.0f64..=1.0, l in 0.0f64..=1.0,
        kappa in 0.0f64..=1.0,
    ) {
        let run = |mode| {
            let mut value = ValueTd::new(vec![0.3, -0.2, 1.0], vec![kappa; 3], StepSize::Constant(0.1));
            let mut direct = DirectVar::new(vec![1.0; 3], vec![kappa; 3], StepSize::Constant(0.1));
            let mut vtd = VtdEstimator::new(vec![2.0; 3], vec![kappa; 3], StepSize::Constant(0.1));
            let t = transition(s, sn, r, g, l, 1.0);
            for _ in 0..3 {
                let d = value.step(&t, mode);
                direct.step(&t, d, value.j[t.s], mode);
                vtd.step(&t, &value.j, mode);
            }
            (value.j, direct.v, vtd.m)
        };
        let on = run(WeightingMode::OnPolicy);
        prop_assert_eq!(&on, &run(WeightingMode::OffPolicyTargetVariance));
        prop_assert_eq!(&on, &run(WeightingMode::OffPolicyReturnVariance));
    }

    #[test]
    fn accumulating_trace_recursion(steps in prop::collection::vec((0usize..4, 0.0f64..=1.0, 0.0f64..2.0), 1..50)) {
        let mut trace = Trace::new(4);
        let mut expected = [0.0f64; 4];
        for (s, decay, w) in steps {
            trace.update(s, decay, w);
            for (i, e) in expected.iter_mut().enumerate() {
                *e = w * (decay * *e) + if i == s { w } else { 0.0 };
            }
            for i in 0..4 {
                prop_assert!((trace.as_slice()[i] - expected[i]).abs() < 1e-12);
            }
        }
    }
}
