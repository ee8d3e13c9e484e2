use std::path::Path;
use std::process::{Command, Output};

fn cli(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lambda-variance"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn list_prints_presets() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["list"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let names: Vec<String> = stdout(&o).lines().map(str::to_owned).collect();
    for want in ["fig4", "fig8", "fig11", "fig13a", "fig15"] {
        assert!(names.iter().any(|n| n == want), "{names:?}");
    }
}

#[test]
fn run_preset_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["run", "--preset", "fig4", "--runs", "3", "--out", "out"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = dir.path().join("out");
    for f in ["results.json", "value.csv", "second_moment.csv", "direct.csv", "vtd.csv"] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    for s in 0..5 {
        assert!(out.join(format!("curves_state{s}.svg")).is_file());
    }
    let doc = lambda_variance::io::ResultsDocument::load(&out.join("results.json")).unwrap();
    assert_eq!(doc.metadata.num_runs, 3);
    assert_eq!(doc.config.name, "fig4");
    let rows = lambda_variance::io::read_csv(&out.join("direct.csv")).unwrap();
    assert_eq!(rows.len(), doc.times.len() * doc.num_states);
}

#[test]
fn seed_override_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["run", "--preset", "fig7", "--runs", "2", "--seed", "99", "--out", "o"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = lambda_variance::io::ResultsDocument::load(&dir.path().join("o/results.json")).unwrap();
    assert_eq!(doc.metadata.base_seed, 99);
}

#[test]
fn unknown_preset_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["run", "--preset", "nosuch"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nosuch"));
}

#[test]
fn bad_config_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("bad.toml"),
        "schema_version = 1\n[experiment]\nname = \"x\"\nmdp = \"chain\"\nalpha = 0.1\nalpha_bar = 0.1\nrun_length = 10\ncolour = 3\n",
    )
    .unwrap();
    let o = cli(&["run", "--config", "bad.toml"], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let o = cli(&["run", "--config", "missing.toml"], dir.path());
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn config_file_run_matches_rendered_preset() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = lambda_variance::experiments::preset("fig4").unwrap();
    cfg.num_runs = 2;
    cfg.run_length = 200;
    std::fs::write(dir.path().join("c.toml"), lambda_variance::io::render_config(&cfg)).unwrap();
    let o = cli(&["run", "--config", "c.toml", "--out", "r"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = lambda_variance::io::ResultsDocument::load(&dir.path().join("r/results.json")).unwrap();
    assert_eq!(doc.config, cfg);
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("file"), "x").unwrap();
    let o = cli(&["run", "--preset", "fig4", "--runs", "1", "--out", "file/sub"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(cli(&["run"], dir.path()).status.code(), Some(2));
    assert_eq!(cli(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(cli(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn export_mdp_round_trips_through_truth() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["export-mdp", "--name", "complex4", "--out", "c4.toml"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let o = cli(&["truth", "--mdp", "c4.toml"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let from_file: lambda_variance::GroundTruth = serde_json::from_str(&stdout(&o)).unwrap();
    let o = cli(&["truth", "--mdp", "complex4"], dir.path());
    let builtin: lambda_variance::GroundTruth = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(from_file, builtin);
    assert_eq!(cli(&["export-mdp", "--name", "grid"], dir.path()).status.code(), Some(2));
}

#[test]
fn truth_modes_and_monte_carlo() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["truth", "--mdp", "chain", "--out", "t.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let t: lambda_variance::GroundTruth =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("t.json")).unwrap()).unwrap();
    assert!((t.v[0] - 2.997541).abs() < 1e-12);

    let o = cli(&["truth", "--mdp", "chain", "--monte-carlo-steps", "20000", "--seed", "3"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let mc: lambda_variance::GroundTruth = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(mc.v[4].is_nan());
    assert!((mc.v[0] - 2.997541).abs() < 5.0 * mc.std_err[0]);

    let o = cli(&["truth", "--mdp", "complex4", "--mode", "off_policy_return_variance"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(cli(&["truth", "--mdp", "chain", "--mode", "sideways"], dir.path()).status.code(), Some(2));
}

#[test]
fn table1_prints_every_row() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["table1", "--runs", "2"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for name in lambda_variance::experiments::TABLE1_PRESETS {
        assert!(text.lines().any(|l| l.starts_with(name)), "{text}");
    }
}
