//! The variance Bellman equation under an approximate value table holds up to
//! three times the value error.

use lambda_variance::mdp::builtin_chain;
use lambda_variance::oracles::{exact_value, theorem1_epsilon, verify_theorem1_bound};
use lambda_variance::rng::stream;
use rand::Rng;

fn main() -> lambda_variance::Result<()> {
    let (mdp, _, pi) = builtin_chain();
    let j = exact_value(&mdp, &pi)?;
    let mut rng = stream(5);
    for trial in 0..3 {
        let approx: Vec<f64> = j.iter().map(|x| x + rng.random_range(-0.5..=0.5)).collect();
        let eps = theorem1_epsilon(&mdp, &pi, &approx)?;
        println!("trial {trial}");
        for c in verify_theorem1_bound(&mdp, &pi, &approx, &eps)?.iter().take(4) {
            println!(
                "  state {}: |V - rhs| = {:.4}  3ε = {:.4}  {}",
                c.state,
                c.difference.abs(),
                c.bound,
                if c.pass { "ok" } else { "violated" }
            );
        }
    }
    Ok(())
}
