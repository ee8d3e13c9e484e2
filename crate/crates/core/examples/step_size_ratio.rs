//! How the ratio between the value and variance step sizes shapes the two
//! variance learners on the chain. Prints V(0) over time for each preset.

use lambda_variance::experiments::{preset, run_experiment, Series};

fn main() -> lambda_variance::Result<()> {
    for name in ["fig4", "fig5", "fig6"] {
        let cfg = preset(name)?;
        let truth = cfg.truth()?;
        let res = run_experiment(&cfg, &truth)?;
        println!("{name}: α = {:?}, ᾱ = {:?}, v(0) = {:.3}", cfg.alpha, cfg.alpha_bar, truth.v[0]);
        for series in [Series::Direct, Series::Vtd] {
            let curve: Vec<f64> = res.aggregate(series).unwrap().mean.iter().map(|r| r[0]).collect();
            let min = curve.iter().copied().fold(f64::INFINITY, f64::min);
            let max = curve.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            println!(
                "  {:<7} min {min:>8.3}  max {max:>7.3}  final {:>6.3}",
                series.name(),
                curve.last().unwrap()
            );
        }
    }
    Ok(())
}
