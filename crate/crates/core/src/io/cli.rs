//! `lambda-variance` command line.
//!
//! ```text
//! lambda-variance list
//! lambda-variance truth --mdp chain|complex4|FILE [--mode MODE] [--monte-carlo-steps N] [--out FILE]
//! lambda-variance run (--preset NAME | --config FILE) [--out DIR] [--seed N] [--runs N]
//! lambda-variance table1 [--runs N]
//! lambda-variance export-mdp --name chain|complex4 [--out FILE]
//! ```
//!
//! Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 internal
//! invariant failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use super::{emit_csv, emit_svg_curves, load_config, ResultsDocument};
use crate::error::{Error, Result};
use crate::estimators::WeightingMode;
use crate::experiments::{preset, run_experiment, scenario_catalog, ExperimentConfig, MdpSource, Series, TABLE1_PRESETS};
use crate::mdp::{builtin_chain, builtin_complex4, MdpDocument};
use crate::oracles::monte_carlo_moments;
use crate::rng::stream;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "lambda-variance", version, about = "Variance of the λ-return: oracles and TD estimators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the preset names.
    List,
    /// Compute ground truth and write it as JSON.
    Truth {
        /// `chain`, `complex4`, or an MDP document.
        #[arg(long)]
        mdp: String,
        #[arg(long, default_value = "on_policy")]
        mode: String,
        /// Estimate the variance by Monte Carlo instead of a linear solve.
        #[arg(long)]
        monte_carlo_steps: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a preset or config file and write results, CSVs and SVGs.
    Run {
        #[arg(long, conflicts_with = "config", required_unless_present = "config")]
        preset: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        runs: Option<usize>,
    },
    /// Run the update-magnitude presets and print the table.
    Table1 {
        #[arg(long)]
        runs: Option<usize>,
    },
    /// Write a built-in MDP as an MDP document.
    ExportMdp {
        #[arg(long)]
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::UnknownPreset(_) | Error::InvalidMdp(_) | Error::Document { .. } => EXIT_CONFIG,
        Error::Io { .. } => EXIT_IO,
        Error::Singular(_)
        | Error::Divergent
        | Error::TerminalStep(_)
        | Error::PathBudget { .. }
        | Error::Invariant(_) => EXIT_INVARIANT,
    }
}

/// Parses `args` (including the program name) and executes the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Entry point for the binary.
pub fn main_with_env() -> i32 {
    run(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr())
}

fn write_text(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e)),
    }
}

fn mdp_source(name: &str) -> MdpSource {
    match name {
        "chain" => MdpSource::Chain,
        "complex4" => MdpSource::Complex4,
        path => MdpSource::File(PathBuf::from(path)),
    }
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<()> {
    let io_out = |e| Error::io("<stdout>", e);
    match cmd {
        Command::List => {
            for cfg in scenario_catalog() {
                writeln!(out, "{}", cfg.name).map_err(io_out)?;
            }
            Ok(())
        }
        Command::Truth {
            mdp,
            mode,
            monte_carlo_steps,
            seed,
            out: path,
        } => {
            let mode = WeightingMode::parse(&mode)
                .ok_or_else(|| Error::Config(format!("unknown mode `{mode}`")))?;
            let mut cfg = ExperimentConfig::new("truth", mdp_source(&mdp), 0.0, 0.0, 0);
            cfg.mode = mode;
            let mut truth = cfg.truth()?;
            if let Some(steps) = monte_carlo_steps {
                let p = cfg.problem()?;
                truth = monte_carlo_moments(
                    &p.mdp,
                    &p.behavior,
                    &p.target,
                    &truth.j,
                    mode,
                    steps,
                    1e-8,
                    &mut stream(seed),
                )?;
            }
            let json = serde_json::to_string_pretty(&truth).expect("truth serializes");
            write_text(path.as_deref(), &(json + "\n"), out)
        }
        Command::Run {
            preset: name,
            config,
            out: dir,
            seed,
            runs,
        } => {
            let mut cfg = match (name, config) {
                (Some(n), _) => preset(&n)?,
                (None, Some(p)) => load_config(&p)?,
                (None, None) => return Err(Error::Config("need --preset or --config".into())),
            };
            if let Some(s) = seed {
                cfg.base_seed = s;
            }
            if let Some(r) = runs {
                cfg.num_runs = r;
            }
            let truth = cfg.truth()?;
            let result = run_experiment(&cfg, &truth)?;
            let doc = ResultsDocument::from_run(&result, &truth)?;
            doc.verify()?;
            std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
            doc.save(&dir.join("results.json"))?;
            for series in Series::ALL {
                if doc.curve(series).is_some() {
                    emit_csv(&doc, &[series], &dir.join(format!("{}.csv", series.name())))?;
                }
            }
            let svgs = emit_svg_curves(&doc, &dir.join("curves_"))?;
            writeln!(
                out,
                "{}: {} runs x {} -> {} ({} plots)",
                cfg.name,
                cfg.num_runs,
                cfg.run_length,
                dir.display(),
                svgs.len()
            )
            .map_err(io_out)?;
            for (series, m) in &doc.mse {
                writeln!(out, "  steady-state MSE {:<6} {:.6}", series.name(), m.summed).map_err(io_out)?;
            }
            Ok(())
        }
        Command::Table1 { runs } => {
            writeln!(out, "{:<8} {:>10} {:>10} {:>10} {:>10}", "preset", "Value", "Snd Mmnt", "VTD", "Direct")
                .map_err(io_out)?;
            for name in TABLE1_PRESETS {
                let mut cfg = preset(name)?;
                if let Some(r) = runs {
                    cfg.num_runs = r;
                }
                let truth = cfg.truth()?;
                let m = run_experiment(&cfg, &truth)?.magnitude;
                writeln!(
                    out,
                    "{name:<8} {:>10.5} {:>10.5} {:>10.5} {:>10.5}",
                    m.value, m.second_moment, m.vtd, m.direct
                )
                .map_err(io_out)?;
            }
            Ok(())
        }
        Command::ExportMdp { name, out: path } => {
            let (mdp, mu, pi) = match name.as_str() {
                "chain" => builtin_chain(),
                "complex4" => builtin_complex4(),
                other => return Err(Error::Config(format!("no built-in MDP named `{other}`"))),
            };
            let text = MdpDocument::from_model(&mdp, &mu, &pi, Some(&name)).to_toml();
            write_text(path.as_deref(), &text, out)
        }
    }
}
