//! Command-line definitions and subcommand bodies.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use anyhow::Context;
use cfslice_core::channel::build_channel;
use cfslice_core::optimizer::{run_scheme, AoTrace};
use cfslice_core::{EvalReport, Scheme, Setup};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bench::{run_bench, write_bench_csv};
use crate::harness::{compare_gains, run_sweep, write_results, write_trials, Format, SweepSpec};
use crate::io::{load_setup, ConfigError};
use crate::validate::{run_validation, Hooks, SUITES};

#[derive(Debug, Parser)]
#[command(name = "cfslice", version, about = "Network-sliced uplink cell-free massive MIMO resource management")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one drop with one scheme and print the evaluation report.
    Run(RunArgs),
    /// Monte-Carlo sweep over K for several schemes.
    Sweep(SweepArgs),
    /// Run the built-in consistency suites.
    Validate(ValidateArgs),
    /// Measure runtime against K.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// JSON config file (defaults to the `desk` preset).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Built-in starting point: full, desk or overloaded.
    #[arg(long, conflicts_with = "config")]
    pub preset: Option<String>,
    /// Override one key, e.g. `config.tau_p=5`. Repeatable.
    #[arg(long = "set", short = 's', value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Replaces `config.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<Setup, ConfigError> {
        let mut overrides = self.overrides.clone();
        if let Some(seed) = self.seed {
            overrides.push(format!("config.seed={seed}"));
        }
        load_setup(self.config.as_deref(), self.preset.as_deref(), &overrides)
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long, default_value = "proposed")]
    pub scheme: Scheme,
    /// Include the per-iteration optimization trace.
    #[arg(long)]
    pub trace: bool,
    /// Write to a file instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Comma-separated UE counts.
    #[arg(long = "k", value_delimiter = ',', default_values_t = [10usize, 20, 30, 40, 50, 60])]
    pub k_values: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, value_delimiter = ',', default_values_t = Scheme::ALL)]
    pub schemes: Vec<Scheme>,
    #[arg(long, default_value = "csv")]
    pub format: Format,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Also write every per-trial record as JSON lines.
    #[arg(long, value_name = "PATH")]
    pub dump_trials: Option<PathBuf>,
    /// Also write the relative-gain table as JSON.
    #[arg(long, value_name = "PATH")]
    pub gains: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Run only these suites (repeatable).
    #[arg(long = "suite")]
    pub suites: Vec<String>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Negative control: scale the matrix-form SINR numerator.
    #[arg(long, hide = true, default_value_t = 1.0)]
    pub perturb_sinr_numerator: f64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long = "k", value_delimiter = ',', default_values_t = [10usize, 20, 40, 80, 160])]
    pub k_values: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [Scheme::Proposed, Scheme::Hybrid])]
    pub schemes: Vec<Scheme>,
    /// Parallel trials; 1 keeps timings free of core contention.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, default_value = "csv")]
    pub format: Format,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Errors mapped to exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

#[derive(Debug, Serialize)]
pub struct RunOutput {
    pub scheme: Scheme,
    pub seed: u64,
    #[serde(rename = "K")]
    pub k: usize,
    pub report: EvalReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<AoTrace>,
    /// Excluded from reproducibility comparisons.
    pub wall_time_s: f64,
}

pub fn cmd_run(setup: &Setup, scheme: Scheme, with_trace: bool) -> anyhow::Result<RunOutput> {
    let scenario = setup.generate()?;
    let channel = build_channel(&scenario)?;
    let start = Instant::now();
    let outcome = run_scheme(&scenario, &channel, scheme)?;
    let wall_time_s = start.elapsed().as_secs_f64();
    Ok(RunOutput {
        scheme,
        seed: setup.config.seed,
        k: scenario.num_ues(),
        report: outcome.report,
        trace: with_trace.then_some(outcome.trace),
        wall_time_s,
    })
}

fn sink(path: Option<&PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn resolve(args: &ConfigArgs) -> anyhow::Result<Setup> {
    args.resolve().map_err(|e| UsageError(e.to_string()).into())
}

/// Dispatches a parsed command. Returns `Ok(false)` when validation ran but
/// some suite failed.
pub fn execute(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Run(args) => {
            let setup = resolve(&args.config)?;
            let out = cmd_run(&setup, args.scheme, args.trace)?;
            log::info!(
                "{} on K={} finished in {:.3} ms",
                out.scheme,
                out.k,
                out.wall_time_s * 1e3
            );
            let mut w = sink(args.output.as_ref())?;
            serde_json::to_writer_pretty(&mut w, &out)?;
            writeln!(w)?;
            w.flush()?;
            Ok(true)
        }
        Command::Sweep(args) => {
            let spec = SweepSpec {
                k_values: args.k_values,
                n_trials: args.trials,
                schemes: args.schemes,
                base: resolve(&args.config)?,
            };
            spec.validate().map_err(|e| UsageError(e.to_string()))?;
            let start = Instant::now();
            let run = run_sweep(&spec)?;
            log::info!(
                "{} drops x {} schemes in {:.2} s",
                spec.k_values.len() * spec.n_trials,
                spec.schemes.len(),
                start.elapsed().as_secs_f64()
            );
            write_results(&run.result, args.format, sink(args.output.as_ref())?)?;
            if let Some(path) = &args.dump_trials {
                write_trials(&run.trials, sink(Some(path))?)?;
            }
            if let Some(path) = &args.gains {
                let mut w = sink(Some(path))?;
                serde_json::to_writer_pretty(&mut w, &compare_gains(&run.result))?;
                writeln!(w)?;
                w.flush()?;
            }
            Ok(true)
        }
        Command::Validate(args) => {
            if let Some(bad) = args.suites.iter().find(|s| !SUITES.contains(&s.as_str())) {
                return Err(UsageError(format!(
                    "unknown suite `{bad}` (expected one of: {})",
                    SUITES.join(", ")
                ))
                .into());
            }
            let hooks = Hooks {
                sinr_numerator_scale: args.perturb_sinr_numerator,
            };
            let reports = run_validation(&args.suites, args.seed, &hooks)?;
            for r in &reports {
                log::info!(
                    "{:<18} {}  ({} cases, {} failures) {}",
                    r.suite,
                    if r.passed { "pass" } else { "FAIL" },
                    r.cases,
                    r.failures,
                    r.detail
                );
            }
            let mut w = sink(None)?;
            serde_json::to_writer_pretty(&mut w, &reports)?;
            writeln!(w)?;
            w.flush()?;
            Ok(reports.iter().all(|r| r.passed))
        }
        Command::Bench(args) => {
            let setup = resolve(&args.config)?;
            if args.k_values.is_empty() || args.k_values.contains(&0) || args.trials == 0 {
                return Err(UsageError("bench needs positive K values and trials".into()).into());
            }
            let table = run_bench(&setup, &args.k_values, args.trials, &args.schemes, args.workers)?;
            for s in &table.slopes {
                match s.loglog_slope {
                    Some(v) => log::info!("{}: log-log runtime slope {v:.3}", s.scheme),
                    None => log::info!("{}: slope needs two K values", s.scheme),
                }
            }
            let mut w = sink(args.output.as_ref())?;
            match args.format {
                Format::Csv => write_bench_csv(&table, &mut w)?,
                Format::Json => {
                    serde_json::to_writer_pretty(&mut w, &table)?;
                    writeln!(w)?;
                }
            }
            w.flush()?;
            Ok(true)
        }
    }
}
