//! Average absolute update size of each learner, per episode on the chain and
//! per step on the four-state MDP.

use lambda_variance::experiments::{preset, run_experiment, TABLE1_PRESETS};

fn main() -> lambda_variance::Result<()> {
    println!("{:<7} {:>10} {:>10} {:>10} {:>10}", "preset", "value", "2nd mmnt", "vtd", "direct");
    for name in TABLE1_PRESETS {
        let mut cfg = preset(name)?;
        cfg.num_runs = 10;
        let truth = cfg.truth()?;
        let m = run_experiment(&cfg, &truth)?.magnitude;
        println!(
            "{name:<7} {:>10.5} {:>10.5} {:>10.5} {:>10.5}",
            m.value, m.second_moment, m.vtd, m.direct
        );
    }
    Ok(())
}
