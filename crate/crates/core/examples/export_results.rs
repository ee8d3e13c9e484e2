//! Run a preset and write the results document, per-series CSV files and one
//! SVG plot per state. Set `LAMBDA_VARIANCE_OUT` to choose the directory.

use std::path::PathBuf;

use lambda_variance::experiments::{preset, run_experiment, Series};
use lambda_variance::io::{emit_csv, emit_svg_curves, ResultsDocument};

fn main() -> lambda_variance::Result<()> {
    let dir = std::env::var_os("LAMBDA_VARIANCE_OUT")
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("lambda-variance-fig5"));
    std::fs::create_dir_all(&dir).map_err(|e| lambda_variance::Error::io(&dir, e))?;

    let mut cfg = preset("fig5")?;
    cfg.num_runs = 10;
    let truth = cfg.truth()?;
    let res = run_experiment(&cfg, &truth)?;
    let doc = ResultsDocument::from_run(&res, &truth)?;

    doc.save(&dir.join("results.json"))?;
    emit_csv(&doc, &[Series::Direct, Series::Vtd], &dir.join("variance.csv"))?;
    let plots = emit_svg_curves(&doc, &dir.join("curves_"))?;
    let back = ResultsDocument::load(&dir.join("results.json"))?;
    println!("config hash {}", back.metadata.config_hash);
    println!("wrote results.json, variance.csv and {} plots to {}", plots.len(), dir.display());
    Ok(())
}
