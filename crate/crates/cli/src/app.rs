//! The `qkt` command line.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qkt_core::{haar_baseline, SpinSystem};
use serde::Serialize;
use serde_json::json;

use crate::analysis;
use crate::check;
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::experiments::{self, EnsembleSummary, RunOptions};
use crate::output::{self, Metadata};
use crate::reproduce;

#[derive(Debug, Parser)]
#[command(name = "qkt", version, about = "Quantum kicked top simulator")]
pub struct Cli {
    /// Worker threads for ensembles and sphere sampling (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Print a machine-readable summary to stdout and omit timestamps.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve one state and write its time series.
    Evolve(RunArgs),
    /// Average the su(2) purity over an ensemble and fit its early decay.
    Ensemble(RunArgs),
    /// Write the fidelity between the kicked top and its perturbed copy.
    Fidelity(RunArgs),
    /// Label sphere points by their classical Lyapunov estimate.
    Classical(ClassicalArgs),
    /// Compare Haar-random states with the predicted mean GE.
    Rmt(RmtArgs),
    /// Run the algebraic self-test.
    Check(CheckArgs),
    /// Regenerate a canned scenario.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Run configuration (TOML, or JSON for `.json` files).
    #[arg(long)]
    pub config: PathBuf,
    /// Output CSV, overriding `output_path`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed override for Haar initial states and seeded ensembles.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ClassicalArgs {
    #[arg(long, default_value_t = 3.0)]
    pub k: f64,
    /// Number of Fibonacci-sphere points.
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    /// Trajectory length per point.
    #[arg(long, default_value_t = qkt_core::classical::DEFAULT_LYAPUNOV_STEPS)]
    pub steps: usize,
    #[arg(long, default_value = "classical.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RmtArgs {
    /// Spin quantum number.
    #[arg(long = "j", default_value_t = 50.0)]
    pub j: f64,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Spins to test, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = check::DEFAULT_SPINS)]
    pub spins: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    pub scenario: Scenario,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scenario {
    /// k=3 chaotic, edge and regular states.
    Fig1,
    /// 90-state ensemble at k=12.
    Fig1Inset,
    /// k=1.1 states on orbits of increasing size.
    Fig2,
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    match cli.threads {
        Some(0) => Err(CliError::validation("threads", "must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::validation("threads", e.to_string()))?
            .install(|| dispatch(cli)),
        None => dispatch(cli),
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    let opts = RunOptions { timestamp: !cli.json };
    match &cli.command {
        Command::Evolve(a) => {
            let cfg = load(a)?;
            let series = experiments::run_timeseries(&cfg, &opts)?;
            let plateau = analysis::plateau(&series.ge_su2());
            report(cli.json, &json!({ "output": cfg.output_path, "ge_su2": plateau }), || {
                format!(
                    "wrote {} rows to {}; final-third mean GE {:.6}",
                    series.rows.len(),
                    cfg.output_path.display(),
                    plateau.mean
                )
            })
        }
        Command::Ensemble(a) => {
            let cfg = load(a)?;
            let series = experiments::run_ensemble(&cfg, &opts)?;
            let summary = EnsembleSummary::from_series(&series, cfg.j)?;
            report(cli.json, &summary, || ensemble_text(&summary, &cfg.output_path))
        }
        Command::Fidelity(a) => {
            let cfg = load(a)?;
            let f = experiments::run_fidelity(&cfg, &opts)?;
            let last = *f.last().expect("at least one step");
            report(cli.json, &json!({ "output": cfg.output_path, "final_fidelity": last }), || {
                format!("wrote {}; F({}) = {last:.10}", cfg.output_path.display(), cfg.steps)
            })
        }
        Command::Classical(a) => {
            let samples = experiments::run_classical(a.k, a.points, a.steps)?;
            let mut meta = Metadata::new(opts.timestamp);
            meta.push("k", a.k.to_string());
            meta.push("steps", a.steps.to_string());
            output::write_atomic(&a.out, &experiments::classical_csv(&samples, &meta))?;
            let chaotic = samples.iter().filter(|s| s.label == "chaotic").count();
            let fraction = chaotic as f64 / samples.len() as f64;
            report(
                cli.json,
                &json!({ "output": a.out, "k": a.k, "points": a.points, "chaotic_fraction": fraction }),
                || format!("k={}: {chaotic}/{} points chaotic", a.k, samples.len()),
            )
        }
        Command::Rmt(a) => {
            let sys = SpinSystem::<f64>::from_j(a.j)?;
            let b = haar_baseline(&sys, a.samples, a.seed)?;
            let summary = json!({
                "j": a.j,
                "samples": b.samples,
                "seed": a.seed,
                "rmt_prediction": b.mean_ge,
                "sample_mean": b.sample_mean,
                "sample_stderr": b.sample_stderr,
                "z_score": b.z_score(),
            });
            report(cli.json, &summary, || {
                format!(
                    "J={}: mean GE {:.6} +- {:.6} over {} states; predicted {:.6}",
                    a.j, b.sample_mean, b.sample_stderr, b.samples, b.mean_ge
                )
            })
        }
        Command::Check(a) => {
            let outcomes = check::run_checks(&a.spins)?;
            let failed: Vec<_> = outcomes.iter().filter(|o| !o.passed).collect();
            report(cli.json, &outcomes, || {
                outcomes
                    .iter()
                    .map(|o| {
                        let status = if o.passed { "ok  " } else { "FAIL" };
                        format!("{status} J={:<5} {:<20} {:.3e}", o.j, o.name, o.residual)
                    })
                    .collect::<Vec<_>>()
                    .join("\n")
            })?;
            if let Some(f) = failed.first() {
                return Err(CliError::Numerical(format!(
                    "{} check{} failed, first: {} at J={} (residual {:e})",
                    failed.len(),
                    if failed.len() == 1 { "" } else { "s" },
                    f.name,
                    f.j,
                    f.residual
                )));
            }
            Ok(())
        }
        Command::Reproduce(a) => match a.scenario {
            Scenario::Fig1 => {
                let s = reproduce::mixed_phase_space(&a.out, &opts)?;
                report(cli.json, &s, || {
                    s.states
                        .iter()
                        .map(|m| {
                            format!(
                                "{:<8} final-third GE {:.6} (classical: {})",
                                m.state.name, m.state.plateau.mean, m.classical_label
                            )
                        })
                        .collect::<Vec<_>>()
                        .join("\n")
                })
            }
            Scenario::Fig1Inset => {
                let s = reproduce::chaotic_ensemble(&a.out, a.seed, &opts)?;
                report(cli.json, &s, || ensemble_text(&s, &a.out.join("fig1_inset.csv")))
            }
            Scenario::Fig2 => {
                let s = reproduce::regular_orbits(&a.out, &opts)?;
                report(cli.json, &s, || {
                    s.states
                        .iter()
                        .map(|r| {
                            format!(
                                "phi={:+.4} plateau {:.4} max {:.4} recurrences {}",
                                r.state.phi,
                                r.state.plateau.mean,
                                r.recurrences.max_ge,
                                if r.recurrences.periodic { "periodic" } else { "none" }
                            )
                        })
                        .collect::<Vec<_>>()
                        .join("\n")
                })
            }
        },
    }
}

fn load(a: &RunArgs) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(&a.config)?;
    if let Some(seed) = a.seed {
        cfg = cfg.with_seed(seed);
    }
    if let Some(out) = &a.out {
        cfg.output_path = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn ensemble_text(s: &EnsembleSummary, path: &Path) -> String {
    format!(
        "wrote {}; saturation {:.6} (predicted {:.6}); fit a = {:.4} over t = 0..={}",
        path.display(),
        s.saturation_mean,
        s.rmt_prediction,
        s.fit_a,
        s.fit_window.1
    )
}

fn report<S: Serialize>(json: bool, summary: &S, text: impl FnOnce() -> String) -> Result<()> {
    if json {
        println!("{}", serde_json::to_string_pretty(summary).expect("summary serializes"));
    } else {
        println!("{}", text());
    }
    Ok(())
}
