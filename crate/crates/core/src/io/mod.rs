//! File formats and the command-line front end.
//!
//! - Config documents (TOML, versioned, unknown keys rejected): [`load_config`].
//! - MDP documents (TOML): [`crate::mdp::MdpDocument`].
//! - Results documents (JSON, with a SHA-256 hash of the embedded config):
//!   [`ResultsDocument`].
//! - CSV curves ([`emit_csv`]) and per-state SVG plots ([`emit_svg_curves`]).

pub mod cli;
mod config_doc;
mod csv;
mod results;
mod svg;

pub use config_doc::{load_config, parse_config, render_config, ConfigDocument, CONFIG_SCHEMA_VERSION};
pub use csv::{emit_csv, read_csv, render_csv, CsvRow, CSV_HEADER};
pub use results::{config_hash, CurveDocument, Metadata, ResultsDocument, RESULTS_SCHEMA_VERSION};
pub use svg::{emit_svg_curves, render_svg};
