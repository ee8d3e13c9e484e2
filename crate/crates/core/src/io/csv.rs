use std::fmt::Write as _;
use std::path::Path;

use super::results::ResultsDocument;
use crate::error::{Error, Result};
use crate::experiments::Series;

pub const CSV_HEADER: &str = "time,state,estimator,mean,std,truth";

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub time: u64,
    pub state: usize,
    pub estimator: String,
    pub mean: f64,
    pub std: f64,
    pub truth: f64,
}

/// Rows ordered by time, then state, then estimator name. Series missing from
/// the document are skipped.
pub fn render_csv(doc: &ResultsDocument, series: &[Series]) -> String {
    let mut curves: Vec<_> = series.iter().filter_map(|&s| doc.curve(s)).collect();
    curves.sort_by_key(|c| c.estimator.name());
    curves.dedup_by_key(|c| c.estimator);
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (t, &time) in doc.times.iter().enumerate() {
        for s in 0..doc.num_states {
            for c in &curves {
                let truth = c.estimator.truth(&doc.truth, s);
                writeln!(
                    out,
                    "{time},{s},{},{:.16e},{:.16e},{:.16e}",
                    c.estimator.name(),
                    c.mean[t][s],
                    c.std[t][s],
                    truth
                )
                .unwrap();
            }
        }
    }
    out
}

pub fn emit_csv(doc: &ResultsDocument, series: &[Series], path: &Path) -> Result<()> {
    std::fs::write(path, render_csv(doc, series)).map_err(|e| Error::io(path, e))
}

pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::document(path, "missing or unexpected CSV header"));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let bad = || Error::document(path, format!("bad row {}: `{line}`", i + 2));
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return Err(bad());
            }
            Ok(CsvRow {
                time: f[0].parse().map_err(|_| bad())?,
                state: f[1].parse().map_err(|_| bad())?,
                estimator: f[2].to_owned(),
                mean: f[3].parse().map_err(|_| bad())?,
                std: f[4].parse().map_err(|_| bad())?,
                truth: f[5].parse().map_err(|_| bad())?,
            })
        })
        .collect()
}
