//! Ground truth for the value and the variance of the λ-return.
//!
//! Three independent routes are provided: linear solves of the Bellman
//! equations ([`exact_value`], [`exact_variance`], [`exact_variance_offpolicy`]),
//! Monte Carlo simulation of sampled λ-returns ([`monte_carlo_moments`]) and
//! exhaustive enumeration of trajectory prefixes ([`brute_force_variance`]).

mod brute_force;
mod exact;
mod monte_carlo;
mod theorem;

pub use brute_force::{brute_force_variance, BruteForce, PATH_BUDGET};
pub use exact::{
    exact_second_moment, expected_sq_td_error, exact_value, exact_variance, exact_variance_for_mode,
    exact_variance_offpolicy, ground_truth, value_residual, variance_residual,
};
pub use monte_carlo::{lemma1_check, monte_carlo_moments, LemmaWeight, MeanWithError};
pub use theorem::{theorem1_epsilon, verify_theorem1_bound, Theorem1Check};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    LinearSolve,
    MonteCarlo,
    BruteForce,
}

/// Per-state value `j` and variance `v` of the λ-return.
///
/// Monte Carlo truth carries standard errors and per-state sample counts; a
/// state that was never visited has `NaN` estimates and zero samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    #[serde(with = "nan_as_null")]
    pub j: Vec<f64>,
    #[serde(with = "nan_as_null")]
    pub v: Vec<f64>,
    pub method: Method,
    /// Standard errors of `v` (zero for exact methods).
    #[serde(with = "nan_as_null")]
    pub std_err: Vec<f64>,
    /// Standard errors of `j` (zero for exact methods).
    #[serde(with = "nan_as_null")]
    pub j_std_err: Vec<f64>,
    #[serde(default)]
    pub samples: Vec<u64>,
}

impl GroundTruth {
    pub fn exact(j: Vec<f64>, v: Vec<f64>) -> Self {
        let n = j.len();
        GroundTruth {
            j,
            v,
            method: Method::LinearSolve,
            std_err: vec![0.0; n],
            j_std_err: vec![0.0; n],
            samples: Vec::new(),
        }
    }

    pub fn num_states(&self) -> usize {
        self.j.len()
    }

    pub fn is_missing(&self, s: usize) -> bool {
        self.v[s].is_nan()
    }

    /// `v + j²`, the second moment of the λ-return.
    pub fn second_moment(&self) -> Vec<f64> {
        self.v.iter().zip(&self.j).map(|(v, j)| v + j * j).collect()
    }
}

mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|x| if x.is_nan() { None } else { Some(*x) })
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let v: Vec<Option<f64>> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|x| x.unwrap_or(f64::NAN)).collect())
    }
}
