/// Accumulating eligibility trace.
///
/// A step decays every entry by `decay` and adds one at the visited state,
/// then scales the whole trace by `weight` (the importance weighting).
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    e: Vec<f64>,
}

impl Trace {
    pub fn new(n: usize) -> Self {
        Trace { e: vec![0.0; n] }
    }

    pub fn update(&mut self, s: usize, decay: f64, weight: f64) {
        let k = weight * decay;
        if k == 0.0 {
            self.e.iter_mut().for_each(|x| *x = 0.0);
        } else {
            self.e.iter_mut().for_each(|x| *x *= k);
        }
        self.e[s] += weight;
    }

    pub fn reset(&mut self) {
        self.e.iter_mut().for_each(|x| *x = 0.0);
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.e
    }
}
