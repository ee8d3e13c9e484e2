//! Variance learning with the value table fixed at its true values.

use lambda_variance::experiments::{preset, run_experiment, Series};

fn main() -> lambda_variance::Result<()> {
    let cfg = preset("fig7")?;
    let truth = cfg.truth()?;
    let res = run_experiment(&cfg, &truth)?;
    let pts = res.config.window_points();
    println!("state  truth   direct: mean    std   vtd: mean    std");
    for s in 0..4 {
        println!(
            "{s:>5} {:>6.3} {:>14.3} {:>6.3} {:>11.3} {:>6.3}",
            truth.v[s],
            res.tail_mean(Series::Direct, s, pts),
            res.tail_std(Series::Direct, s, pts),
            res.tail_mean(Series::Vtd, s, pts),
            res.tail_std(Series::Vtd, s, pts),
        );
    }
    println!("value update magnitude: {}", res.magnitude.value);
    Ok(())
}
