//! `entroq` — simulate and optimize the von Neumann entropy of a driven
//! open two-qubit system.

mod figures;
mod output;
mod runner;
mod scenario;
mod simulate;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use entroq::model::ModelParameters;
use runner::{Overrides, RunStatus};

#[derive(Parser)]
#[command(name = "entroq", version, about = "Entropy control for an open two-qubit system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the free evolution of a diagonal state and emit the
    /// entropy decay columns with the analytic overlay.
    Simulate(SimulateArgs),
    /// Run a scenario file (optimization or plain evolution).
    Run(RunArgs),
    /// Run the built-in verification suites (analytic oracle, adjoint
    /// pairing, gradient vs finite differences).
    Verify(VerifyArgs),
    /// Re-shape a run directory into per-figure CSV bundles.
    ExportFigures(ExportArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Initial diagonal state, four comma-separated probabilities.
    #[arg(long, default_value = "0.25,0.25,0.25,0.25", value_parser = parse_diagonal)]
    diagonal: std::vec::Vec<f64>,
    /// Final time.
    #[arg(long, default_value_t = 300.0)]
    horizon: f64,
    /// RK4 steps.
    #[arg(long, default_value_t = 30_000)]
    steps: usize,
    /// System-environment coupling override.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Output directory.
    #[arg(long, short, default_value = "runs/simulate")]
    out: PathBuf,
}

fn parse_diagonal(s: &str) -> Result<Vec<f64>, String> {
    let values: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    if values.len() != 4 {
        return Err(format!("expected 4 probabilities, got {}", values.len()));
    }
    Ok(values)
}

#[derive(Args)]
struct RunArgs {
    /// Scenario TOML file.
    scenario: PathBuf,
    /// Override the GA seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the RK4 step count.
    #[arg(long)]
    steps: Option<usize>,
    /// Override the iteration budget.
    #[arg(long)]
    max_iters: Option<usize>,
    /// Override the number of GA trials.
    #[arg(long)]
    trials: Option<usize>,
    /// Run GA trials in parallel (fitness evaluation is parallel otherwise).
    #[arg(long)]
    parallel: bool,
    /// Root directory for outputs (overrides ENTROQ_OUTPUT_ROOT).
    #[arg(long)]
    out_root: Option<PathBuf>,
    /// Validate the scenario and print its canonical form without running.
    #[arg(long)]
    dry_run: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Print the measured errors for passing checks too.
    #[arg(long, short)]
    verbose: bool,
    /// Model parameters used by the analytic oracle only (negative
    /// control: perturbed values must make the oracle check fail).
    #[arg(long)]
    oracle_params: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    /// Run directory containing trajectory.csv / controls.csv /
    /// history.jsonl.
    run_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Simulate(args) => {
            let mut params = ModelParameters::default();
            if let Some(eps) = args.epsilon {
                params.epsilon = eps;
            }
            let diagonal: [f64; 4] = args.diagonal.as_slice().try_into().unwrap();
            simulate::run_simulate(&params, &diagonal, args.horizon, args.steps, &args.out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Run(args) => {
            if args.dry_run {
                let parsed = scenario::Scenario::load(&args.scenario)?;
                let canonical = parsed.canonical()?;
                let base = args.scenario.parent().unwrap_or(std::path::Path::new("."));
                parsed
                    .resolve(base)
                    .with_context(|| format!("validating {}", args.scenario.display()))?;
                print!("{canonical}");
                return Ok(ExitCode::SUCCESS);
            }
            let overrides = Overrides {
                seed: args.seed,
                steps: args.steps,
                max_iters: args.max_iters,
                trials: args.trials,
                parallel: args.parallel,
                out_root: args.out_root,
            };
            let outcome = runner::run_scenario_file(&args.scenario, &overrides)
                .with_context(|| format!("running {}", args.scenario.display()))?;
            println!("summary: {}", outcome.summary_path.display());
            Ok(match outcome.status {
                RunStatus::Converged => ExitCode::SUCCESS,
                RunStatus::BudgetExhausted => ExitCode::from(2),
            })
        }
        Command::Verify(args) => {
            let all_passed = verify::verify(args.oracle_params.as_deref(), args.verbose)?;
            Ok(if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::ExportFigures(args) => {
            figures::export_figures(&args.run_dir)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
