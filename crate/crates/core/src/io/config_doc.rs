use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::ExperimentConfig;

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

/// ```toml
/// schema_version = 1
///
/// [experiment]
/// name = "chain-equal"
/// mdp = "chain"
/// alpha = 0.001
/// alpha_bar = "adadelta"
/// run_length = 20000
/// log_every = 10
/// value_init = { truth_plus_error = { err_ratio = 0.5 } }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub schema_version: u32,
    pub experiment: ExperimentConfig,
}

pub fn parse_config(text: &str, origin: &Path) -> Result<ExperimentConfig> {
    let doc: ConfigDocument = toml::from_str(text).map_err(|e| Error::document(origin, e))?;
    if doc.schema_version != CONFIG_SCHEMA_VERSION {
        return Err(Error::document(
            origin,
            format!(
                "unsupported schema_version {} (expected {CONFIG_SCHEMA_VERSION})",
                doc.schema_version
            ),
        ));
    }
    doc.experiment.validate()?;
    Ok(doc.experiment)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, path)
}

pub fn render_config(cfg: &ExperimentConfig) -> String {
    let doc = ConfigDocument {
        schema_version: CONFIG_SCHEMA_VERSION,
        experiment: cfg.clone(),
    };
    toml::to_string(&doc).expect("configs always serialize")
}
