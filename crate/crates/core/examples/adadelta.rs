//! Both learners with ADADELTA step sizes on the chain, including the
//! per-state step sizes they end up using.

use lambda_variance::experiments::{preset, run_experiment, Series};

fn main() -> lambda_variance::Result<()> {
    let cfg = preset("fig9")?;
    let truth = cfg.truth()?;
    let res = run_experiment(&cfg, &truth)?;
    let pts = res.config.window_points();
    for series in [Series::Value, Series::Direct, Series::Vtd] {
        let rates = &res.step_sizes[&series].mean;
        let last = rates.last().unwrap();
        let est: Vec<String> = (0..4).map(|s| format!("{:.3}", res.tail_mean(series, s, pts))).collect();
        let lr: Vec<String> = last[..4].iter().map(|x| format!("{x:.2e}")).collect();
        println!("{:<14} estimate [{}]  step [{}]", series.name(), est.join(", "), lr.join(", "));
    }
    println!("truth v        [{}]", truth.v[..4].iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(", "));
    Ok(())
}
