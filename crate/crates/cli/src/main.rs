use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crackfield::constitutive::ModelKind;
use crackfield::scenarios::{BuiltinScenario, Density};
use crackfield_cli::{execute, kink_angle_from_dir, replay, run_sweep, CliError, RunConfig, ScenarioSource, SweepConfig};

/// Phase-field fracture benchmarks and constitutive sweeps.
#[derive(Parser)]
#[command(name = "crackfield", version)]
struct Cli {
    /// Root for default output directories.
    #[arg(long, global = true, env = "CRACKFIELD_OUT", default_value = "runs")]
    out_root: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a finite-element benchmark.
    Run(RunArgs),
    /// Tabulate sigma12/(2 mu eps12) against d.
    Sweep(SweepArgs),
    /// Crack kink angle of a finished run directory.
    KinkAngle {
        dir: PathBuf,
    },
    /// Built-in scenarios.
    Scenarios {
        #[command(subcommand)]
        action: ScenariosAction,
    },
}

#[derive(Subcommand)]
enum ScenariosAction {
    List,
}

#[derive(Args)]
struct RunArgs {
    /// Built-in scenario name (see `scenarios list`).
    #[arg(long, value_parser = parse_scenario, conflicts_with_all = ["file", "replay"])]
    scenario: Option<BuiltinScenario>,
    /// Scenario TOML file.
    #[arg(long, conflicts_with = "replay")]
    file: Option<PathBuf>,
    /// Re-run from a run.json written by an earlier run.
    #[arg(long)]
    replay: Option<PathBuf>,
    #[arg(long, value_parser = parse_model, default_value = "proposed")]
    model: ModelKind,
    #[arg(long, value_parser = parse_density)]
    density: Option<Density>,
    /// Output directory; defaults to <out-root>/<scenario>-<model>.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Drop the d >= d_prev constraint.
    #[arg(long)]
    no_irreversible: bool,
    #[arg(long)]
    k_residual: Option<f64>,
    #[arg(long)]
    alpha_reg: Option<f64>,
    #[arg(long)]
    sk_b: Option<f64>,
    /// Snapshot every N steps; 0 keeps only the initial state.
    #[arg(long, default_value_t = 1)]
    snapshot_every: usize,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_parser = parse_scenario, conflicts_with = "file")]
    scenario: Option<BuiltinScenario>,
    #[arg(long)]
    file: Option<PathBuf>,
    /// Comma-separated model names; all models when omitted.
    #[arg(long, value_delimiter = ',', value_parser = parse_model)]
    models: Option<Vec<ModelKind>>,
    #[arg(long)]
    points: Option<usize>,
    /// Comma-separated d values replacing the equally spaced grid.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    /// CSV file; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_model(s: &str) -> Result<ModelKind, String> {
    ModelKind::from_name(s).ok_or_else(|| {
        let names: Vec<&str> = ModelKind::ALL.iter().map(|m| m.name()).collect();
        format!("unknown model '{s}', expected one of {}", names.join(", "))
    })
}

fn parse_scenario(s: &str) -> Result<BuiltinScenario, String> {
    BuiltinScenario::from_name(s).ok_or_else(|| format!("unknown scenario '{s}', see `scenarios list`"))
}

fn parse_density(s: &str) -> Result<Density, String> {
    Density::from_name(s).ok_or_else(|| format!("unknown density '{s}', expected coarse, medium or fine"))
}

fn run(args: RunArgs, out_root: PathBuf) -> Result<(), CliError> {
    let record = if let Some(path) = &args.replay {
        replay(path, args.out.clone())?
    } else {
        let (source, label) = match (args.scenario, args.file) {
            (Some(b), _) => (ScenarioSource::Builtin(b), b.name().to_string()),
            (None, Some(p)) => {
                let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "scenario".into());
                (ScenarioSource::File(p), stem)
            }
            (None, None) => return Err(CliError::Usage("one of --scenario, --file or --replay is required".into())),
        };
        let out = args.out.unwrap_or_else(|| out_root.join(format!("{label}-{}", args.model.name())));
        let config = RunConfig {
            density: args.density,
            irreversible: !args.no_irreversible,
            k_residual: args.k_residual,
            alpha_reg: args.alpha_reg,
            sk_b: args.sk_b,
            snapshot_every: args.snapshot_every,
            ..RunConfig::new(source, args.model, out)
        };
        execute(&config)?
    };
    println!("{} steps written to {}", record.steps.len(), record.config.out.display());
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<(), CliError> {
    let source = match (args.scenario, args.file) {
        (Some(b), _) => Some(ScenarioSource::Builtin(b)),
        (None, Some(p)) => Some(ScenarioSource::File(p)),
        (None, None) => None,
    };
    let csv = run_sweep(&SweepConfig { source, models: args.models, points: args.points, grid: args.grid })?;
    match args.output {
        Some(p) => std::fs::write(&p, csv).map_err(|e| CliError::Io { context: p.display().to_string(), source: e }),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args, cli.out_root),
        Command::Sweep(args) => sweep(args),
        Command::KinkAngle { dir } => kink_angle_from_dir(&dir).map(|k| {
            println!("{:.2}", k.degrees);
            eprintln!("onset step {}, read at step {}, {} cells", k.onset_step, k.step, k.cells);
        }),
        Command::Scenarios { action: ScenariosAction::List } => {
            for b in BuiltinScenario::ALL {
                println!("{:<22}{}", b.name(), b.description());
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
