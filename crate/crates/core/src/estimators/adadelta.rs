pub const ADADELTA_DECAY: f64 = 0.99;
pub const ADADELTA_EPSILON: f64 = 1e-6;

/// Per-state ADADELTA accumulators.
///
/// `step` folds the squared TD error into `acc_g2` and returns
/// `sqrt(acc_dx2 + ε) / sqrt(acc_g2 + ε)`; `accumulate` folds the applied
/// update into `acc_dx2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Adadelta {
    pub acc_g2: Vec<f64>,
    pub acc_dx2: Vec<f64>,
    pub decay: f64,
    pub epsilon: f64,
}

impl Adadelta {
    pub fn new(n: usize) -> Self {
        Adadelta {
            acc_g2: vec![0.0; n],
            acc_dx2: vec![0.0; n],
            decay: ADADELTA_DECAY,
            epsilon: ADADELTA_EPSILON,
        }
    }

    pub fn step(&mut self, s: usize, g: f64) -> f64 {
        self.acc_g2[s] = self.decay * self.acc_g2[s] + (1.0 - self.decay) * g * g;
        self.rate(s)
    }

    /// Current effective step size at `s` without touching the accumulators.
    pub fn rate(&self, s: usize) -> f64 {
        (self.acc_dx2[s] + self.epsilon).sqrt() / (self.acc_g2[s] + self.epsilon).sqrt()
    }

    pub fn accumulate(&mut self, s: usize, applied: f64) {
        self.acc_dx2[s] = self.decay * self.acc_dx2[s] + (1.0 - self.decay) * applied * applied;
    }
}
