use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use stirap_cli::config::{load_run_config, load_sweep_config};
use stirap_cli::validate::{run_validation_to_dir, ValidateOptions};
use stirap_cli::{run, sweep};
use stirap_core::liouville::GeneratorKind;

#[derive(Parser)]
#[command(
    name = "stirap",
    about = "Adiabatic-basis density-matrix runs for a driven three-level system with phonon dephasing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonRunArgs {
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Record every n-th integration step.
    #[arg(long)]
    stride: Option<usize>,
    /// Upper bound on the integration step (capped at sigma/200).
    #[arg(long)]
    dt: Option<f64>,
    /// Generator construction used for propagation.
    #[arg(long, value_enum)]
    generator: Option<GeneratorCli>,
    /// Use the doubled-diagonal convention in the analytic generator.
    #[arg(long)]
    double_freq: bool,
}

#[derive(clap::ValueEnum, Clone, Copy)]
enum GeneratorCli {
    Analytic,
    Oracle,
}

impl From<GeneratorCli> for GeneratorKind {
    fn from(g: GeneratorCli) -> Self {
        match g {
            GeneratorCli::Analytic => GeneratorKind::Analytic,
            GeneratorCli::Oracle => GeneratorKind::Oracle,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one propagation and write its time series and diagnostics.
    Simulate {
        config: PathBuf,
        #[command(flatten)]
        common: CommonRunArgs,
    },
    /// Run one propagation per axis value and write finals, diagnostics,
    /// and the fit summary.
    Sweep {
        sweep_file: PathBuf,
        #[command(flatten)]
        common: CommonRunArgs,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Compare the analytic generator against the Lindblad oracle and run
    /// the closed-system cross-check.
    Validate {
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "analytic")]
        generator: GeneratorCli,
        #[arg(long)]
        double_freq: bool,
        /// Flat rate for the cross-check run (0 enables the Schrödinger
        /// comparison).
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
    },
}

fn apply_common(opts: &mut stirap_core::liouville::PropagateOptions<f64>, common: &CommonRunArgs) {
    if let Some(stride) = common.stride {
        opts.stride = Some(stride);
    }
    if let Some(dt) = common.dt {
        opts.dt_max = Some(dt);
    }
    if let Some(generator) = common.generator {
        opts.generator = generator.into();
    }
    if common.double_freq {
        opts.double_freq = true;
    }
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Simulate { config, common } => {
            let mut run_config = load_run_config(&config)?;
            apply_common(&mut run_config.run, &common);
            let name = config
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "run".to_string());
            let record = run::simulate_to_dir(&run_config, &name, &common.out)?;
            let finals = record.finals.expect("successful run has finals");
            println!(
                "final populations: rho00 = {:.6}, rho11 = {:.6}, rho22 = {:.6}",
                finals.bare_pops[0], finals.bare_pops[1], finals.bare_pops[2]
            );
            println!("wrote {}", common.out.join(format!("timeseries_{name}.csv")).display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { sweep_file, common, workers } => {
            let mut sweep_config = load_sweep_config(&sweep_file)?;
            apply_common(&mut sweep_config.run, &common);
            let pool = sweep::worker_pool(workers)?;
            let outcome = pool.install(|| sweep::execute_to_dir(&sweep_config, &common.out))?;
            println!(
                "{} runs over {} ({} failed)",
                outcome.summary.n_runs, outcome.summary.axis, outcome.summary.n_failed
            );
            if let Some(fit) = &outcome.summary.transfer_decay_fit {
                println!(
                    "transfer decay constant: {:.4} (r^2 = {:.4}, {} points)",
                    fit.decay_constant, fit.r_squared, fit.points_used
                );
            }
            if let Some(fit) = &outcome.summary.initial_decade_fit {
                println!(
                    "initial-decade decay constant: {:.4} (r^2 = {:.4}, {} points)",
                    fit.decay_constant, fit.r_squared, fit.points_used
                );
            }
            println!("wrote {}", common.out.join("finals.csv").display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { out, generator, double_freq, gamma } => {
            let opts = ValidateOptions { generator: generator.into(), double_freq, gamma };
            let report = run_validation_to_dir(&opts, &out)?;
            println!(
                "generator grid: {} points, {} expected / {} unexpected discrepancies",
                report.grid.points,
                report.grid.expected.len(),
                report.grid.unexpected.len()
            );
            match report.closed_system.max_population_deviation {
                Some(dev) => println!(
                    "closed-system cross-check: max deviation {dev:.3e} ({})",
                    if report.closed_system.pass { "pass" } else { "FAIL" }
                ),
                None => println!(
                    "cross-check run at gamma = {}: {}",
                    report.closed_system.gamma,
                    if report.closed_system.pass { "pass" } else { "FAIL" }
                ),
            }
            println!("wrote {}", out.join("validation_report.json").display());
            Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}
