//! The four-state continuing MDP with different trace parameters for the
//! value and variance learners.

use lambda_variance::experiments::{preset, run_experiment, Series};

fn main() -> lambda_variance::Result<()> {
    for name in ["fig10", "fig13a", "fig13b"] {
        let cfg = preset(name)?;
        let truth = cfg.truth()?;
        let res = run_experiment(&cfg, &truth)?;
        let pts = res.config.window_points();
        println!("{name}: κ = {:?}, κ̄ = {:?}", cfg.kappa, cfg.kappa_bar);
        for s in 0..res.num_states {
            println!(
                "  state {s}: truth {:.3}  direct {:.3}  vtd {:.3}",
                truth.v[s],
                res.tail_mean(Series::Direct, s, pts),
                res.tail_mean(Series::Vtd, s, pts)
            );
        }
    }
    Ok(())
}
