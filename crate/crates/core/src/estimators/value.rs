use super::{StepSize, Trace, WeightingMode};
use crate::mdp::TransitionSample;

/// TD(λ) value learner with accumulating traces.
///
/// The trace decays by `γ(S_t)·κ(S_t)` and is scaled by the mode's value-trace
/// weight (1 on-policy, ρ off-policy).
#[derive(Debug, Clone)]
pub struct ValueTd {
    pub j: Vec<f64>,
    pub trace: Trace,
    pub kappa: Vec<f64>,
    pub alpha: StepSize,
    /// γ of the state the last transition entered, i.e. `γ(S_t)` for the next step.
    gamma_here: f64,
    last_rate: f64,
}

impl ValueTd {
    pub fn new(j: Vec<f64>, kappa: Vec<f64>, alpha: StepSize) -> Self {
        let n = j.len();
        ValueTd {
            j,
            trace: Trace::new(n),
            kappa,
            alpha,
            gamma_here: 0.0,
            last_rate: 0.0,
        }
    }

    pub fn td_error(&self, t: &TransitionSample) -> f64 {
        t.r + t.gamma_next * self.j[t.s_next] - self.j[t.s]
    }

    /// One update; returns `δ` computed from the pre-update table.
    pub fn step(&mut self, t: &TransitionSample, mode: WeightingMode) -> f64 {
        let delta = self.td_error(t);
        let decay = self.gamma_here * self.kappa[t.s];
        self.trace
            .update(t.s, decay, mode.value_trace_weight(t.rho));
        let rate = self.alpha.rate(t.s, delta);
        self.last_rate = rate;
        let scale = rate * delta;
        if scale != 0.0 {
            for (x, e) in self.j.iter_mut().zip(self.trace.as_slice()) {
                *x += scale * e;
            }
        }
        self.alpha.record(t.s, scale);
        self.gamma_here = t.gamma_next;
        delta
    }

    pub fn reset_traces(&mut self) {
        self.trace.reset();
        self.gamma_here = 0.0;
    }

    /// Step size used by the most recent update.
    pub fn last_rate(&self) -> f64 {
        self.last_rate
    }
}
