use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::experiments::{steady_state_mse, ExperimentConfig, MseTable, RunResult, Series, Table, UpdateMagnitude};
use crate::oracles::GroundTruth;

pub const RESULTS_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub artifact_version: String,
    /// Hex SHA-256 of the embedded config rendered as TOML.
    pub config_hash: String,
    pub base_seed: u64,
    pub num_runs: usize,
    pub created_unix_secs: u64,
}

/// Cross-run aggregate of one series, `[logged time][state]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveDocument {
    pub estimator: Series,
    pub mean: Table,
    pub std: Table,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsDocument {
    pub schema_version: u32,
    pub metadata: Metadata,
    pub config: ExperimentConfig,
    pub truth: GroundTruth,
    pub num_states: usize,
    pub times: Vec<u64>,
    pub curves: Vec<CurveDocument>,
    #[serde(default)]
    pub step_sizes: Vec<CurveDocument>,
    /// Steady-state MSE of each variance estimator.
    pub mse: BTreeMap<Series, MseTable>,
    pub update_magnitude: UpdateMagnitude,
}

pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let digest = Sha256::digest(cfg.to_toml().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

impl ResultsDocument {
    pub fn from_run(result: &RunResult, truth: &GroundTruth) -> Result<Self> {
        let curves = result
            .aggregates
            .iter()
            .map(|(&estimator, a)| CurveDocument {
                estimator,
                mean: a.mean.clone(),
                std: a.std.clone(),
            })
            .collect();
        let step_sizes = result
            .step_sizes
            .iter()
            .map(|(&estimator, a)| CurveDocument {
                estimator,
                mean: a.mean.clone(),
                std: a.std.clone(),
            })
            .collect();
        let mut mse = BTreeMap::new();
        for series in result.variance_series() {
            mse.insert(series, steady_state_mse(result, series, truth)?);
        }
        let created = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Ok(ResultsDocument {
            schema_version: RESULTS_SCHEMA_VERSION,
            metadata: Metadata {
                artifact_version: env!("CARGO_PKG_VERSION").to_owned(),
                config_hash: config_hash(&result.config),
                base_seed: result.config.base_seed,
                num_runs: result.config.num_runs,
                created_unix_secs: created,
            },
            config: result.config.clone(),
            truth: truth.clone(),
            num_states: result.num_states,
            times: result.times.clone(),
            curves,
            step_sizes,
            mse,
            update_magnitude: result.magnitude,
        })
    }

    pub fn curve(&self, series: Series) -> Option<&CurveDocument> {
        self.curves.iter().find(|c| c.estimator == series)
    }

    /// Checks the stored hash and the shape of every curve.
    pub fn verify(&self) -> Result<()> {
        let expected = config_hash(&self.config);
        if expected != self.metadata.config_hash {
            return Err(Error::Invariant(format!(
                "config hash {} does not match embedded config ({expected})",
                self.metadata.config_hash
            )));
        }
        if self.truth.num_states() != self.num_states {
            return Err(Error::Invariant("truth has the wrong number of states".into()));
        }
        for c in self.curves.iter().chain(&self.step_sizes) {
            let ok = c.mean.len() == self.times.len()
                && c.std.len() == self.times.len()
                && c.mean.iter().chain(&c.std).all(|row| row.len() == self.num_states);
            if !ok {
                return Err(Error::Invariant(format!(
                    "curve `{}` does not match {} times x {} states",
                    c.estimator.name(),
                    self.times.len(),
                    self.num_states
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("results always serialize")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let doc: ResultsDocument = serde_json::from_str(&text).map_err(|e| Error::document(path, e))?;
        doc.verify()?;
        Ok(doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{run_experiment, MdpSource};

    fn small_doc() -> ResultsDocument {
        let mut cfg = ExperimentConfig::new("r", MdpSource::Chain, 0.01, 0.01, 30);
        cfg.num_runs = 2;
        cfg.log_every = 10;
        let truth = cfg.truth().unwrap();
        let res = run_experiment(&cfg, &truth).unwrap();
        ResultsDocument::from_run(&res, &truth).unwrap()
    }

    #[test]
    fn json_round_trip_verifies() {
        let doc = small_doc();
        doc.verify().unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        doc.save(&path).unwrap();
        let back = ResultsDocument::load(&path).unwrap();
        assert_eq!(back, doc);
    }

    #[test]
    fn tampered_config_fails_verification() {
        let mut doc = small_doc();
        doc.config.num_runs = 3;
        assert!(matches!(doc.verify(), Err(Error::Invariant(_))));
    }

    #[test]
    fn hash_is_stable_hex() {
        let doc = small_doc();
        assert_eq!(doc.metadata.config_hash.len(), 64);
        assert_eq!(doc.metadata.config_hash, config_hash(&doc.config));
    }
}
