use super::{StepSize, Trace, WeightingMode};
use crate::mdp::TransitionSample;

/// Meta-reward of the second-moment learner in its off-policy form:
/// `Ḡ = r + γ'(1 - λ')J(s')`, `R̄ = η²Ḡ² + 2η²γ'λ'ḠJ(s')`.
pub fn vtd_meta_reward(r: f64, gamma: f64, lam: f64, j_next: f64, eta: f64) -> f64 {
    let g_bar = r + gamma * (1.0 - lam) * j_next;
    let e2 = eta * eta;
    e2 * g_bar * g_bar + 2.0 * e2 * gamma * lam * g_bar * j_next
}

/// The on-policy form `(r + γ'J(s'))² - γ'²λ'²J(s')²`.
pub fn vtd_meta_reward_squared_form(r: f64, gamma: f64, lam: f64, j_next: f64) -> f64 {
    let x = r + gamma * j_next;
    let gl = gamma * lam;
    x * x - gl * gl * j_next * j_next
}

/// Second-moment learner. The variance is read out as `M - J²` and may be
/// negative.
#[derive(Debug, Clone)]
pub struct VtdEstimator {
    pub m: Vec<f64>,
    pub trace: Trace,
    pub kappa_bar: Vec<f64>,
    pub alpha_bar: StepSize,
    discount_here: f64,
    last_rate: f64,
}

impl VtdEstimator {
    pub fn new(m: Vec<f64>, kappa_bar: Vec<f64>, alpha_bar: StepSize) -> Self {
        let n = m.len();
        VtdEstimator {
            m,
            trace: Trace::new(n),
            kappa_bar,
            alpha_bar,
            discount_here: 0.0,
            last_rate: 0.0,
        }
    }

    /// One update given the post-update value table. Returns `δ̄`.
    pub fn step(&mut self, t: &TransitionSample, j_post: &[f64], mode: WeightingMode) -> f64 {
        let eta = mode.eta(t.rho);
        let j_next = j_post[t.s_next];
        let meta_reward = vtd_meta_reward(t.r, t.gamma_next, t.lam_next, j_next, eta);
        let gl = eta * t.gamma_next * t.lam_next;
        let meta_discount = gl * gl;
        let delta_bar = meta_reward + meta_discount * self.m[t.s_next] - self.m[t.s];
        self.trace.update(
            t.s,
            self.discount_here * self.kappa_bar[t.s],
            mode.rho_bar(t.rho),
        );
        let rate = self.alpha_bar.rate(t.s, delta_bar);
        self.last_rate = rate;
        let scale = rate * delta_bar;
        if scale != 0.0 {
            for (x, e) in self.m.iter_mut().zip(self.trace.as_slice()) {
                *x += scale * e;
            }
        }
        self.alpha_bar.record(t.s, scale);
        self.discount_here = meta_discount;
        delta_bar
    }

    /// `M(s) - J(s)²`, unclipped.
    pub fn variance(&self, j: &[f64]) -> Vec<f64> {
        self.m.iter().zip(j).map(|(m, j)| m - j * j).collect()
    }

    pub fn variance_at(&self, j: &[f64], s: usize) -> f64 {
        self.m[s] - j[s] * j[s]
    }

    pub fn reset_traces(&mut self) {
        self.trace.reset();
        self.discount_here = 0.0;
    }

    pub fn last_rate(&self) -> f64 {
        self.last_rate
    }
}
