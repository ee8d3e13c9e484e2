//! Off-policy variance learning on the four-state MDP. One preset targets the
//! variance of the target-policy return, the other that of the ρ-weighted return.

use lambda_variance::experiments::{preset, run_experiment, Series};

fn main() -> lambda_variance::Result<()> {
    for name in ["fig14", "fig15"] {
        let cfg = preset(name)?;
        let truth = cfg.truth()?;
        let res = run_experiment(&cfg, &truth)?;
        let pts = res.config.window_points();
        println!("{name} ({})", cfg.mode.name());
        for s in 0..res.num_states {
            println!(
                "  state {s}: j {:.3} v {:.3}  direct {:.3}  vtd {:.3}",
                truth.j[s],
                truth.v[s],
                res.tail_mean(Series::Direct, s, pts),
                res.tail_mean(Series::Vtd, s, pts)
            );
        }
    }
    Ok(())
}
