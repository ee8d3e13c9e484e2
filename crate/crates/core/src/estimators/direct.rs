use super::{StepSize, Trace, WeightingMode};
use crate::mdp::TransitionSample;

/// Direct variance learner: a TD learner whose meta-reward is the squared TD
/// error of the value learner and whose meta-discount is `γ'²λ'²`.
///
/// Off-policy, the meta-reward is `(ηδ + (η - 1)J(s))²`, the meta-discount
/// gains a factor `η²` and the trace is weighted by `ρ̄`.
#[derive(Debug, Clone)]
pub struct DirectVar {
    pub v: Vec<f64>,
    pub trace: Trace,
    pub kappa_bar: Vec<f64>,
    pub alpha_bar: StepSize,
    /// Meta-discount of the state the last transition entered.
    discount_here: f64,
    last_rate: f64,
}

impl DirectVar {
    pub fn new(v: Vec<f64>, kappa_bar: Vec<f64>, alpha_bar: StepSize) -> Self {
        let n = v.len();
        DirectVar {
            v,
            trace: Trace::new(n),
            kappa_bar,
            alpha_bar,
            discount_here: 0.0,
            last_rate: 0.0,
        }
    }

    pub fn meta_reward(delta: f64, j_s_post: f64, eta: f64) -> f64 {
        let x = eta * delta + (eta - 1.0) * j_s_post;
        x * x
    }

    /// One update given the value learner's `delta` and its post-update
    /// estimate `j_s_post` of the current state. Returns `δ̄`.
    pub fn step(
        &mut self,
        t: &TransitionSample,
        delta: f64,
        j_s_post: f64,
        mode: WeightingMode,
    ) -> f64 {
        let eta = mode.eta(t.rho);
        let meta_reward = Self::meta_reward(delta, j_s_post, eta);
        let gl = t.gamma_next * t.lam_next * eta;
        let meta_discount = gl * gl;
        let delta_bar = meta_reward + meta_discount * self.v[t.s_next] - self.v[t.s];
        self.trace.update(
            t.s,
            self.discount_here * self.kappa_bar[t.s],
            mode.rho_bar(t.rho),
        );
        let rate = self.alpha_bar.rate(t.s, delta_bar);
        self.last_rate = rate;
        let scale = rate * delta_bar;
        if scale != 0.0 {
            for (x, e) in self.v.iter_mut().zip(self.trace.as_slice()) {
                *x += scale * e;
            }
        }
        self.alpha_bar.record(t.s, scale);
        self.discount_here = meta_discount;
        delta_bar
    }

    pub fn reset_traces(&mut self) {
        self.trace.reset();
        self.discount_here = 0.0;
    }

    pub fn last_rate(&self) -> f64 {
        self.last_rate
    }
}
