//! Variance learning with a fixed, randomly perturbed value table.
//!
//! For each error ratio the example sweeps the variance step size and reports
//! the best summed MSE of each learner. It also prints what each learner
//! converges to in expectation for one perturbed table: the direct learner
//! tracks the λ-return variance bootstrapped on the perturbed values, VTD
//! tracks its second-moment fixed point minus the squared perturbed values.

use lambda_variance::experiments::{inject_value_error, preset, sweep_step_sizes, Series};
use lambda_variance::mdp::builtin_complex4;
use lambda_variance::oracles::{exact_second_moment, exact_value, exact_variance};
use lambda_variance::rng::stream;

fn main() -> lambda_variance::Result<()> {
    let alpha_bars = [0.03, 0.01, 0.003, 0.001];
    for name in ["fig12", "fig11"] {
        let mut cfg = preset(name)?;
        cfg.num_runs = 30;
        let truth = cfg.truth()?;
        let sweep = sweep_step_sizes(&cfg, &[0.0], &alpha_bars, &truth)?;
        let d = sweep.best_summed(Series::Direct);
        let v = sweep.best_summed(Series::Vtd);
        println!(
            "{name}: best summed MSE direct {:.2} (ᾱ = {}), vtd {:.2} (ᾱ = {})",
            d.mse, d.alpha_bar, v.mse, v.alpha_bar
        );
    }

    let (mdp, mu, _) = builtin_complex4();
    let j = exact_value(&mdp, &mu)?;
    let v = exact_variance(&mdp, &mu, &j)?;
    let perturbed = inject_value_error(&j, 0.5, &v, &mut stream(3));
    let direct = exact_variance(&mdp, &mu, &perturbed)?;
    let m = exact_second_moment(&mdp, &mu, &perturbed)?;
    println!("state  truth  direct limit  vtd limit");
    for s in 0..j.len() {
        println!("{s:>5} {:>6.3} {:>13.3} {:>10.3}", v[s], direct[s], m[s] - perturbed[s].powi(2));
    }
    Ok(())
}
