//! Define an MDP in TOML, validate it, compute its ground truth and run both
//! learners on it.

use lambda_variance::estimators::WeightingMode;
use lambda_variance::experiments::{run_experiment, ExperimentConfig, MdpSource, Series};
use lambda_variance::mdp::MdpDocument;
use lambda_variance::oracles::ground_truth;

const MDP: &str = r#"
schema_version = 1
name = "two-state loop"
num_states = 2
gamma = [0.8, 0.8]
lam = [0.9, 0.9]
start = [1.0, 0.0]
behavior = [[1.0], [0.5, 0.5]]
target = [[1.0], [0.5, 0.5]]

[[transitions]]
state = 0
action = 0
next = 1
prob = 1.0
reward = { kind = "normal", mean = 1.0, var = 1.0 }

[[transitions]]
state = 1
action = 0
next = 0
prob = 1.0
reward = { kind = "constant", value = 0.0 }

[[transitions]]
state = 1
action = 1
next = 1
prob = 1.0
reward = { kind = "constant", value = 2.0 }
"#;

fn main() -> lambda_variance::Result<()> {
    let doc = MdpDocument::from_toml(MDP).expect("valid TOML");
    let (mdp, mu, pi) = doc.clone().into_model()?;
    let truth = ground_truth(&mdp, &mu, &pi, WeightingMode::OnPolicy)?;
    println!("j = {:?}\nv = {:?}", truth.j, truth.v);

    let path = std::env::temp_dir().join("lambda-variance-two-state.toml");
    std::fs::write(&path, doc.to_toml()).expect("writable temp dir");
    let mut cfg = ExperimentConfig::new("two-state", MdpSource::File(path), 0.01, 0.01, 50_000);
    cfg.num_runs = 8;
    cfg.log_every = 100;
    let res = run_experiment(&cfg, &truth)?;
    let pts = cfg.window_points();
    for s in 0..2 {
        println!(
            "state {s}: direct {:.3}  vtd {:.3}",
            res.tail_mean(Series::Direct, s, pts),
            res.tail_mean(Series::Vtd, s, pts)
        );
    }
    Ok(())
}
