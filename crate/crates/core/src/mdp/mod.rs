//! Finite MDPs with state-dependent discount and trace-decay, fixed policies,
//! transition sampling, and the two built-in benchmark problems.

use std::collections::VecDeque;
use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

mod document;

pub use document::{load_mdp, save_mdp, MdpDocument, RewardEntry, TransitionEntry, MDP_SCHEMA_VERSION};

/// Tolerance for probability rows summing to one.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reward {
    Constant(f64),
    /// Normal distribution parameterised by mean and variance.
    Normal { mean: f64, var: f64 },
}

impl Reward {
    pub fn mean(&self) -> f64 {
        match *self {
            Reward::Constant(c) => c,
            Reward::Normal { mean, .. } => mean,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Reward::Constant(_) => 0.0,
            Reward::Normal { var, .. } => var,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Reward::Constant(c) => c,
            Reward::Normal { mean, var } => {
                let z: f64 = rng.sample(StandardNormal);
                mean + var.sqrt() * z
            }
        }
    }
}

/// One possible successor of a state-action pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub next: usize,
    pub prob: f64,
    pub reward: Reward,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Action {
    pub outcomes: Vec<Outcome>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TabularMdp {
    /// `actions[s][a]` is the successor distribution of action `a` in state `s`.
    pub actions: Vec<Vec<Action>>,
    pub gamma: Vec<f64>,
    pub lam: Vec<f64>,
    pub start: Vec<f64>,
    /// Episodic problems restart from `start` whenever a γ = 0 state is entered.
    pub episodic: bool,
}

/// Action probabilities, `probs[s][a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    pub probs: Vec<Vec<f64>>,
}

impl Policy {
    pub fn prob(&self, s: usize, a: usize) -> f64 {
        self.probs[s][a]
    }

    /// Uniform over the actions of each state.
    pub fn uniform(mdp: &TabularMdp) -> Self {
        Policy {
            probs: mdp
                .actions
                .iter()
                .map(|acts| vec![1.0 / acts.len() as f64; acts.len()])
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionSample {
    pub s: usize,
    pub a: usize,
    pub r: f64,
    pub s_next: usize,
    /// Importance ratio π(a|s) / μ(a|s).
    pub rho: f64,
    pub gamma_next: f64,
    pub lam_next: f64,
    /// Set when an episodic MDP entered a terminal (γ = 0) state.
    pub episode_boundary: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoStates,
    ShapeMismatch(String),
    NoActions { state: usize },
    BadProbability { what: String, value: f64 },
    NotNormalized { what: String, sum: f64 },
    NextStateOutOfRange { state: usize, action: usize, next: usize },
    NegativeRewardVariance { state: usize, action: usize },
    GammaOutOfRange { state: usize, value: f64 },
    LambdaOutOfRange { state: usize, value: f64 },
    TargetNotCovered { state: usize, action: usize },
    /// No state with γ < 1 is reachable from `state` under the target policy.
    NoDiscountReachable { state: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoStates => write!(f, "MDP has no states"),
            Violation::ShapeMismatch(m) => write!(f, "shape mismatch: {m}"),
            Violation::NoActions { state } => write!(f, "state {state} has no actions"),
            Violation::BadProbability { what, value } => {
                write!(f, "{what} has probability {value} outside [0, 1]")
            }
            Violation::NotNormalized { what, sum } => write!(f, "{what} sums to {sum}, not 1"),
            Violation::NextStateOutOfRange {
                state,
                action,
                next,
            } => write!(f, "({state}, {action}) transitions to missing state {next}"),
            Violation::NegativeRewardVariance { state, action } => {
                write!(f, "({state}, {action}) has a negative reward variance")
            }
            Violation::GammaOutOfRange { state, value } => {
                write!(f, "gamma({state}) = {value} outside [0, 1]")
            }
            Violation::LambdaOutOfRange { state, value } => {
                write!(f, "lambda({state}) = {value} outside [0, 1]")
            }
            Violation::TargetNotCovered { state, action } => write!(
                f,
                "target policy takes action {action} in state {state} which the behavior policy never takes"
            ),
            Violation::NoDiscountReachable { state } => write!(
                f,
                "no state with gamma < 1 is reachable from state {state} under the target policy"
            ),
        }
    }
}

impl TabularMdp {
    pub fn num_states(&self) -> usize {
        self.gamma.len()
    }

    pub fn num_actions(&self, s: usize) -> usize {
        self.actions[s].len()
    }

    pub fn is_terminal(&self, s: usize) -> bool {
        self.episodic && self.gamma[s] == 0.0
    }

    /// Same MDP with λ replaced by a constant.
    pub fn with_lambda(&self, lam: f64) -> Self {
        let mut m = self.clone();
        m.lam = vec![lam; m.num_states()];
        m
    }

    /// Same MDP with every Normal reward replaced by its mean.
    pub fn with_deterministic_rewards(&self) -> Self {
        let mut m = self.clone();
        for acts in &mut m.actions {
            for act in acts {
                for o in &mut act.outcomes {
                    o.reward = Reward::Constant(o.reward.mean());
                }
            }
        }
        m
    }

    /// Same MDP with all rewards set to `c`.
    pub fn with_constant_rewards(&self, c: f64) -> Self {
        let mut m = self.clone();
        for acts in &mut m.actions {
            for act in acts {
                for o in &mut act.outcomes {
                    o.reward = Reward::Constant(c);
                }
            }
        }
        m
    }

    pub fn sample_start<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        sample_categorical(self.start.iter().copied(), rng)
    }
}

fn sample_categorical<I, R>(probs: I, rng: &mut R) -> usize
where
    I: IntoIterator<Item = f64>,
    R: Rng + ?Sized,
{
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, p) in probs.into_iter().enumerate() {
        if p > 0.0 {
            last_positive = i;
        }
        acc += p;
        if u < acc {
            return i;
        }
    }
    // Rounding left `u` past the cumulative sum.
    last_positive
}

fn check_distribution(what: String, probs: &[f64], out: &mut Vec<Violation>) {
    let mut sum = 0.0;
    for &p in probs {
        if !(0.0..=1.0).contains(&p) || !p.is_finite() {
            out.push(Violation::BadProbability {
                what: what.clone(),
                value: p,
            });
        }
        sum += p;
    }
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        out.push(Violation::NotNormalized { what, sum });
    }
}

/// Checks every structural invariant of `mdp` and the two policies, including
/// reachability of a state with γ < 1 from every state under `pi`.
///
/// Violations are returned as data; an empty report means the triple is valid.
pub fn validate_mdp(mdp: &TabularMdp, pi: &Policy, mu: &Policy) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = mdp.num_states();
    if n == 0 {
        out.push(Violation::NoStates);
        return out;
    }
    if mdp.actions.len() != n || mdp.lam.len() != n || mdp.start.len() != n {
        out.push(Violation::ShapeMismatch(format!(
            "{} gamma entries, {} lambda entries, {} action rows, {} start entries",
            n,
            mdp.lam.len(),
            mdp.actions.len(),
            mdp.start.len()
        )));
        return out;
    }
    for (name, policy) in [("target", pi), ("behavior", mu)] {
        if policy.probs.len() != n
            || policy
                .probs
                .iter()
                .zip(&mdp.actions)
                .any(|(p, a)| p.len() != a.len())
        {
            out.push(Violation::ShapeMismatch(format!(
                "{name} policy does not match the action sets"
            )));
            return out;
        }
    }

    for s in 0..n {
        let g = mdp.gamma[s];
        if !(0.0..=1.0).contains(&g) || !g.is_finite() {
            out.push(Violation::GammaOutOfRange { state: s, value: g });
        }
        let l = mdp.lam[s];
        if !(0.0..=1.0).contains(&l) || !l.is_finite() {
            out.push(Violation::LambdaOutOfRange { state: s, value: l });
        }
        if mdp.actions[s].is_empty() {
            out.push(Violation::NoActions { state: s });
        }
        for (a, act) in mdp.actions[s].iter().enumerate() {
            let probs: Vec<f64> = act.outcomes.iter().map(|o| o.prob).collect();
            check_distribution(format!("transition row ({s}, {a})"), &probs, &mut out);
            for o in &act.outcomes {
                if o.next >= n {
                    out.push(Violation::NextStateOutOfRange {
                        state: s,
                        action: a,
                        next: o.next,
                    });
                }
                if o.reward.variance() < 0.0 {
                    out.push(Violation::NegativeRewardVariance {
                        state: s,
                        action: a,
                    });
                }
            }
        }
        check_distribution(format!("target policy row {s}"), &pi.probs[s], &mut out);
        check_distribution(format!("behavior policy row {s}"), &mu.probs[s], &mut out);
        for a in 0..mdp.actions[s].len() {
            if pi.probs[s][a] > 0.0 && mu.probs[s][a] <= 0.0 {
                out.push(Violation::TargetNotCovered {
                    state: s,
                    action: a,
                });
            }
        }
    }
    check_distribution("start distribution".to_string(), &mdp.start, &mut out);

    if out
        .iter()
        .any(|v| matches!(v, Violation::NextStateOutOfRange { .. }))
    {
        return out;
    }
    for s in unreachable_discount(mdp, pi) {
        out.push(Violation::NoDiscountReachable { state: s });
    }
    out
}

/// States from which no γ < 1 state can be entered in one or more steps under `pi`.
fn unreachable_discount(mdp: &TabularMdp, pi: &Policy) -> Vec<usize> {
    let n = mdp.num_states();
    // Reverse edges of the support graph.
    let mut preds = vec![Vec::new(); n];
    for s in 0..n {
        for (a, act) in mdp.actions[s].iter().enumerate() {
            if pi.probs[s][a] <= 0.0 {
                continue;
            }
            for o in act.outcomes.iter().filter(|o| o.prob > 0.0) {
                preds[o.next].push(s);
            }
        }
    }
    // A state is good if it has an edge into a γ < 1 state, or into a good state.
    let mut good = vec![false; n];
    let mut queue = VecDeque::new();
    for target in 0..n {
        if mdp.gamma[target] < 1.0 {
            for &p in &preds[target] {
                if !good[p] {
                    good[p] = true;
                    queue.push_back(p);
                }
            }
        }
    }
    while let Some(x) = queue.pop_front() {
        for &p in &preds[x] {
            if !good[p] {
                good[p] = true;
                queue.push_back(p);
            }
        }
    }
    (0..n).filter(|&s| !good[s]).collect()
}

/// Fails with [`Error::InvalidMdp`] unless [`validate_mdp`] returns an empty report.
pub fn ensure_valid(mdp: &TabularMdp, pi: &Policy, mu: &Policy) -> Result<()> {
    let report = validate_mdp(mdp, pi, mu);
    if report.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidMdp(report))
    }
}

/// Draws one transition from `s`: the action from `mu`, the successor and reward
/// from the model, and the importance ratio against `pi`.
pub fn sample_step<R: Rng + ?Sized>(
    mdp: &TabularMdp,
    mu: &Policy,
    pi: &Policy,
    s: usize,
    rng: &mut R,
) -> Result<TransitionSample> {
    if mdp.is_terminal(s) {
        return Err(Error::TerminalStep(s));
    }
    let a = sample_categorical(mu.probs[s].iter().copied(), rng);
    let act = &mdp.actions[s][a];
    let k = sample_categorical(act.outcomes.iter().map(|o| o.prob), rng);
    let outcome = &act.outcomes[k];
    let r = outcome.reward.sample(rng);
    let s_next = outcome.next;
    let rho = pi.probs[s][a] / mu.probs[s][a];
    let gamma_next = mdp.gamma[s_next];
    Ok(TransitionSample {
        s,
        a,
        r,
        s_next,
        rho,
        gamma_next,
        lam_next: mdp.lam[s_next],
        episode_boundary: mdp.episodic && gamma_next == 0.0,
    })
}

/// A stream of transitions that restarts episodic MDPs at terminal states.
pub struct Sampler<'a> {
    pub mdp: &'a TabularMdp,
    pub mu: &'a Policy,
    pub pi: &'a Policy,
    state: usize,
}

impl<'a> Sampler<'a> {
    pub fn new<R: Rng + ?Sized>(
        mdp: &'a TabularMdp,
        mu: &'a Policy,
        pi: &'a Policy,
        rng: &mut R,
    ) -> Self {
        let state = mdp.sample_start(rng);
        Sampler { mdp, mu, pi, state }
    }

    pub fn state(&self) -> usize {
        self.state
    }

    pub fn next<R: Rng + ?Sized>(&mut self, rng: &mut R) -> TransitionSample {
        let t = sample_step(self.mdp, self.mu, self.pi, self.state, rng)
            .expect("sampler never steps from a terminal state");
        self.state = if t.episode_boundary {
            self.mdp.sample_start(rng)
        } else {
            t.s_next
        };
        t
    }
}

/// Four non-terminal states in a line ending in a terminal state.
///
/// Single action, deterministic moves `i -> i+1`, rewards Normal(1, 1),
/// γ = 1 except γ(4) = 0, λ = 0.9 everywhere, start in state 0. The terminal
/// state carries a zero-reward self loop so that every state has an action.
/// Returns `(mdp, behavior, target)` with identical policies.
pub fn builtin_chain() -> (TabularMdp, Policy, Policy) {
    let n = 5;
    let mut actions = Vec::with_capacity(n);
    for s in 0..n {
        let outcome = if s + 1 < n {
            Outcome {
                next: s + 1,
                prob: 1.0,
                reward: Reward::Normal {
                    mean: 1.0,
                    var: 1.0,
                },
            }
        } else {
            Outcome {
                next: s,
                prob: 1.0,
                reward: Reward::Constant(0.0),
            }
        };
        actions.push(vec![Action {
            outcomes: vec![outcome],
        }]);
    }
    let mut gamma = vec![1.0; n];
    gamma[n - 1] = 0.0;
    let mut start = vec![0.0; n];
    start[0] = 1.0;
    let mdp = TabularMdp {
        actions,
        gamma,
        lam: vec![0.9; n],
        start,
        episodic: true,
    };
    let policy = Policy {
        probs: vec![vec![1.0]; n],
    };
    (mdp, policy.clone(), policy)
}

/// A four-state continuing MDP with state-dependent γ and λ and two actions
/// per state.
///
/// | state | γ   | λ   | action 0                    | action 1                 |
/// |-------|-----|-----|-----------------------------|--------------------------|
/// | 0     | 1.0 | 1.0 | → 1 (0.7), 2 (0.3); N(1, 0.25)   | → 2 (0.5), 3 (0.5); N(0.5, 0.125) |
/// | 1     | 0.9 | 0.9 | → 0 (0.4), 2 (0.6); N(1.5, 0.5)  | → 3; N(0.2, 0.05)         |
/// | 2     | 0.6 | 0.5 | → 1 (0.5), 3 (0.5); N(0.8, 0.2)  | → 0; N(1.2, 0.3)          |
/// | 3     | 0.0 | 0.3 | → 0; N(1, 0.1)                    | → 1 (0.5), 2 (0.5); N(-0.5, 0.15) |
///
/// State 3 has γ = 0 and acts as a soft terminal: bootstrapping stops there
/// but sampling continues. Behavior μ: `[.5,.5], [.6,.4], [.7,.3], [.5,.5]`;
/// target π: `[.7,.3], [.4,.6], [.5,.5], [.7,.3]`. The chain starts uniformly.
/// Returns `(mdp, μ, π)`.
pub fn builtin_complex4() -> (TabularMdp, Policy, Policy) {
    fn normal(mean: f64, var: f64) -> Reward {
        Reward::Normal { mean, var }
    }
    fn act(outcomes: &[(usize, f64)], reward: Reward) -> Action {
        Action {
            outcomes: outcomes
                .iter()
                .map(|&(next, prob)| Outcome { next, prob, reward })
                .collect(),
        }
    }
    let actions = vec![
        vec![
            act(&[(1, 0.7), (2, 0.3)], normal(1.0, 0.25)),
            act(&[(2, 0.5), (3, 0.5)], normal(0.5, 0.125)),
        ],
        vec![
            act(&[(0, 0.4), (2, 0.6)], normal(1.5, 0.5)),
            act(&[(3, 1.0)], normal(0.2, 0.05)),
        ],
        vec![
            act(&[(1, 0.5), (3, 0.5)], normal(0.8, 0.2)),
            act(&[(0, 1.0)], normal(1.2, 0.3)),
        ],
        vec![
            act(&[(0, 1.0)], normal(1.0, 0.1)),
            act(&[(1, 0.5), (2, 0.5)], normal(-0.5, 0.15)),
        ],
    ];
    let mdp = TabularMdp {
        actions,
        gamma: vec![1.0, 0.9, 0.6, 0.0],
        lam: vec![1.0, 0.9, 0.5, 0.3],
        start: vec![0.25; 4],
        episodic: false,
    };
    let mu = Policy {
        probs: vec![
            vec![0.5, 0.5],
            vec![0.6, 0.4],
            vec![0.7, 0.3],
            vec![0.5, 0.5],
        ],
    };
    let pi = Policy {
        probs: vec![
            vec![0.7, 0.3],
            vec![0.4, 0.6],
            vec![0.5, 0.5],
            vec![0.7, 0.3],
        ],
    };
    (mdp, mu, pi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn chain_is_valid() {
        let (mdp, mu, pi) = builtin_chain();
        assert!(validate_mdp(&mdp, &pi, &mu).is_empty());
    }

    #[test]
    fn chain_without_discount_violates_reachability() {
        let (mut mdp, mu, pi) = builtin_chain();
        mdp.gamma = vec![1.0; 5];
        let report = validate_mdp(&mdp, &pi, &mu);
        assert!(report
            .iter()
            .any(|v| matches!(v, Violation::NoDiscountReachable { .. })));
    }

    #[test]
    fn unnormalized_row_is_reported() {
        let (mut mdp, mu, pi) = builtin_chain();
        mdp.actions[1][0].outcomes[0].prob = 0.9;
        let report = validate_mdp(&mdp, &pi, &mu);
        assert!(report
            .iter()
            .any(|v| matches!(v, Violation::NotNormalized { .. })));
    }

    #[test]
    fn uncovered_target_action_is_reported() {
        let (mdp, mut mu, pi) = builtin_complex4();
        mu.probs[2] = vec![1.0, 0.0];
        let report = validate_mdp(&mdp, &pi, &mu);
        assert!(report.contains(&Violation::TargetNotCovered {
            state: 2,
            action: 1
        }));
    }

    #[test]
    fn complex4_is_valid_and_off_policy_everywhere() {
        let (mdp, mu, pi) = builtin_complex4();
        assert!(validate_mdp(&mdp, &pi, &mu).is_empty());
        assert!(validate_mdp(&mdp, &mu, &mu).is_empty());
        for s in 0..4 {
            let diff = (0..2)
                .map(|a| (mu.prob(s, a) - pi.prob(s, a)).abs())
                .fold(0.0, f64::max);
            assert!(diff > 0.0, "state {s}");
        }
        assert!(mdp.gamma.contains(&0.0));
    }

    #[test]
    fn chain_first_step() {
        let (mdp, mu, pi) = builtin_chain();
        let mut rng = stream(7);
        let t = sample_step(&mdp, &mu, &pi, 0, &mut rng).unwrap();
        assert_eq!((t.a, t.s_next), (0, 1));
        assert_eq!(t.rho, 1.0);
        assert_eq!(t.gamma_next, 1.0);
        assert_eq!(t.lam_next, 0.9);
        assert!(!t.episode_boundary);
    }

    #[test]
    fn stepping_from_terminal_is_an_error() {
        let (mdp, mu, pi) = builtin_chain();
        let mut rng = stream(0);
        assert!(matches!(
            sample_step(&mdp, &mu, &pi, 4, &mut rng),
            Err(Error::TerminalStep(4))
        ));
    }

    #[test]
    fn chain_episodes_have_four_transitions() {
        let (mdp, mu, pi) = builtin_chain();
        let mut rng = stream(1);
        let mut sampler = Sampler::new(&mdp, &mu, &pi, &mut rng);
        let mut len = 0;
        let mut episodes = 0;
        for _ in 0..400 {
            let t = sampler.next(&mut rng);
            len += 1;
            if t.episode_boundary {
                assert_eq!(len, 4);
                assert_eq!(t.s_next, 4);
                len = 0;
                episodes += 1;
            }
        }
        assert_eq!(episodes, 100);
    }

    #[test]
    fn chain_reward_moments() {
        let (mdp, mu, pi) = builtin_chain();
        let mut rng = stream(3);
        let n = 200_000;
        let rs: Vec<f64> = (0..n)
            .map(|_| sample_step(&mdp, &mu, &pi, 0, &mut rng).unwrap().r)
            .collect();
        let mean = rs.iter().sum::<f64>() / n as f64;
        let var = rs.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 3.0 * (1.0 / n as f64).sqrt());
        assert!((var - 1.0).abs() < 0.02);
    }

    #[test]
    fn complex4_action_frequencies_match_behavior() {
        let (mdp, mu, pi) = builtin_complex4();
        let mut rng = stream(11);
        let n = 1_000_000;
        let mut count = [0usize; 2];
        for _ in 0..n {
            let t = sample_step(&mdp, &mu, &pi, 0, &mut rng).unwrap();
            count[t.a] += 1;
            assert_eq!(t.rho * mu.prob(0, t.a), pi.prob(0, t.a));
        }
        let p = mu.prob(0, 0);
        let se = (p * (1.0 - p) / n as f64).sqrt();
        let freq = count[0] as f64 / n as f64;
        assert!((freq - p).abs() < 3.0 * se, "freq {freq}, p {p}");
    }

    #[test]
    fn identical_seeds_give_identical_trajectories() {
        let (mdp, mu, pi) = builtin_complex4();
        let run = |seed| {
            let mut rng = stream(seed);
            let mut sampler = Sampler::new(&mdp, &mu, &pi, &mut rng);
            (0..1000).map(|_| sampler.next(&mut rng)).collect::<Vec<_>>()
        };
        let a = run(5);
        let b = run(5);
        assert!(a
            .iter()
            .zip(&b)
            .all(|(x, y)| x.r.to_bits() == y.r.to_bits() && x.s_next == y.s_next));
    }
}
