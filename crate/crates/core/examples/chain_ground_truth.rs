//! Value and λ-return variance on the five-state chain, computed three ways.

use lambda_variance::estimators::WeightingMode;
use lambda_variance::mdp::builtin_chain;
use lambda_variance::oracles::{brute_force_variance, exact_value, exact_variance, monte_carlo_moments};
use lambda_variance::rng::stream;

fn main() -> lambda_variance::Result<()> {
    let (mdp, mu, pi) = builtin_chain();
    let j = exact_value(&mdp, &pi)?;
    let v = exact_variance(&mdp, &pi, &j)?;
    let bf = brute_force_variance(&mdp, &pi, &j, 4)?;
    let mc = monte_carlo_moments(&mdp, &mu, &pi, &j, WeightingMode::OnPolicy, 200_000, 1e-8, &mut stream(1))?;

    println!("state       j   v(exact)   v(brute)   v(mc) ± se");
    for s in 0..4 {
        println!(
            "{s:>5} {:>7.3} {:>10.6} {:>10.6} {:>9.4} ± {:.4}",
            j[s], v[s], bf.variance[s], mc.v[s], mc.std_err[s]
        );
    }
    Ok(())
}
