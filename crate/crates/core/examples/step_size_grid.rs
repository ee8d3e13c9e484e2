//! Mean squared error of each learner over a grid of step sizes, starting
//! from the true value and variance.

use lambda_variance::experiments::{preset, sweep_step_sizes, Series};

fn main() -> lambda_variance::Result<()> {
    let cfg = preset("fig8")?;
    let truth = cfg.truth()?;
    let grid = [0.05, 0.01, 0.005, 0.001];
    let sweep = sweep_step_sizes(&cfg, &grid, &grid, &truth)?;
    println!("{:>7} {:>7} {:>10} {:>10}", "α", "ᾱ", "direct", "vtd");
    for c in &sweep.cells {
        println!(
            "{:>7} {:>7} {:>10.4} {:>10.4}",
            c.alpha,
            c.alpha_bar,
            c.mse[&Series::Direct].summed,
            c.mse[&Series::Vtd].summed
        );
    }
    Ok(())
}
