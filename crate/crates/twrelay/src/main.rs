//! Experiment CLI: parameter sweeps, the two reference figures, plot-data
//! emission and the self-check harness.
//!
//! Exit codes: 0 success, 1 validation or runtime failure, 2 usage or
//! config error.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use twrelay::experiment::{parse_experiment, ExperimentSpec, FadingMode};
use twrelay::plotdata::emit_plot_data;
use twrelay::sweep::{run_sweep, write_csv};
use twrelay::validate::run_validation;
use twrelay_core::DistortionMode;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DistortionModeArg {
    Realization,
    Expectation,
}

#[derive(Parser, Debug)]
#[command(
    name = "twrelay",
    about = "Spectral-efficiency experiments for a multipair massive-MIMO two-way AF relay with hardware impairments"
)]
struct Cli {
    /// Experiment config file (flat key = value lines, # comments)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Monte Carlo trials per grid point
    #[arg(long, global = true)]
    trials: Option<usize>,

    /// Master seed for the trial streams
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (default: all cores); results are identical for any value
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output path (CSV for sweeps, directory for plot-data, JSON for validate)
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// How transceiver distortion enters each trial
    #[arg(long, global = true, value_enum)]
    distortion_mode: Option<DistortionModeArg>,

    /// Draw large-scale fading from N(1, 0.2) instead of the fixed
    /// symmetric profile
    #[arg(long, global = true)]
    paper_fading: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// SE per device versus N for a grid of impairment levels κ
    Fig1,
    /// Sum SE versus N under the scaling law κ = κ₀ N^(z/2) for several z
    Fig2,
    /// Run the sweep described by --config as-is
    Sweep,
    /// Cross-check the fast path against dense linear algebra and the
    /// norm-identity convergence suite
    Validate,
    /// Split a sweep CSV into per-curve .dat files plus a gnuplot stub
    PlotData {
        /// CSV produced by fig1, fig2 or sweep
        csv: PathBuf,
    },
}

fn apply_overrides(mut spec: ExperimentSpec, cli: &Cli) -> ExperimentSpec {
    if let Some(t) = cli.trials {
        spec.n_trials = t;
    }
    if let Some(s) = cli.seed {
        spec.master_seed = s;
    }
    if let Some(m) = cli.distortion_mode {
        spec.distortion_mode = match m {
            DistortionModeArg::Realization => DistortionMode::Realization,
            DistortionModeArg::Expectation => DistortionMode::ConditionalExpectation,
        };
    }
    if cli.paper_fading {
        spec.fading = FadingMode::Drawn { fading_seed: spec.master_seed };
    }
    spec
}

fn load_spec(cli: &Cli, defaults: ExperimentSpec) -> Result<ExperimentSpec, ExitCode> {
    let spec = match &cli.config {
        Some(path) => parse_experiment(path, defaults).map_err(|e| {
            eprintln!("error: {e}");
            ExitCode::from(2)
        })?,
        None => defaults,
    };
    Ok(apply_overrides(spec, cli))
}

fn run_sweep_command(cli: &Cli, defaults: ExperimentSpec, default_out: &str) -> ExitCode {
    let spec = match load_spec(cli, defaults) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let started = Instant::now();
    let rows = run_sweep(&spec);
    let out_path = cli.output.clone().unwrap_or_else(|| PathBuf::from(default_out));
    let mut buf = Vec::new();
    if let Err(e) = write_csv(&mut buf, &rows) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if let Err(e) = fs::write(&out_path, &buf) {
        eprintln!("error: {}: {e}", out_path.display());
        return ExitCode::from(1);
    }
    eprintln!(
        "wrote {} rows to {} in {:.1} s",
        rows.len(),
        out_path.display(),
        started.elapsed().as_secs_f64()
    );
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Some(threads) = cli.threads {
        if let Err(e) =
            rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()
        {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }

    match &cli.command {
        Command::Fig1 => {
            run_sweep_command(&cli, ExperimentSpec::kappa_sweep_defaults(), "fig1.csv")
        }
        Command::Fig2 => {
            run_sweep_command(&cli, ExperimentSpec::scaling_sweep_defaults(), "fig2.csv")
        }
        Command::Sweep => {
            run_sweep_command(&cli, ExperimentSpec::kappa_sweep_defaults(), "sweep.csv")
        }
        Command::Validate => {
            let seed = cli.seed.unwrap_or(twrelay::experiment::DEFAULT_SEED);
            let started = Instant::now();
            let report = run_validation(seed);
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            match &cli.output {
                Some(path) => {
                    if let Err(e) = fs::write(path, &json) {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                }
                None => println!("{json}"),
            }
            for check in &report.checks {
                eprintln!(
                    "{} {}: {}",
                    if check.pass { "pass" } else { "FAIL" },
                    check.name,
                    check.detail
                );
            }
            eprintln!("validation finished in {:.1} s", started.elapsed().as_secs_f64());
            if report.all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::PlotData { csv } => {
            let out_dir = cli.output.clone().unwrap_or_else(|| PathBuf::from("."));
            match emit_plot_data(csv, &out_dir) {
                Ok(files) => {
                    let mut stdout = std::io::stdout().lock();
                    for f in files {
                        let _ = writeln!(stdout, "{}", f.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
    }
}
