//! Run configuration, artifact writing and replay.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crackfield::constitutive::ModelKind;
use crackfield::fem::{SolutionState, StepReport};
use crackfield::io::{history_row, write_vtk, HISTORY_HEADER};
use crackfield::scenarios::{build, constitutive_sweep, BuiltinScenario, Density, ScenarioSpec, Setup};

use crate::CliError;

/// Where the scenario comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScenarioSource {
    Builtin(BuiltinScenario),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub source: ScenarioSource,
    pub model: ModelKind,
    /// Overrides the scenario's density when set.
    pub density: Option<Density>,
    pub out: PathBuf,
    pub irreversible: bool,
    pub k_residual: Option<f64>,
    pub alpha_reg: Option<f64>,
    pub sk_b: Option<f64>,
    /// Write a snapshot every this many steps; 0 writes only the initial state.
    pub snapshot_every: usize,
}

impl RunConfig {
    pub fn new(source: ScenarioSource, model: ModelKind, out: PathBuf) -> Self {
        Self {
            source,
            model,
            density: None,
            out,
            irreversible: true,
            k_residual: None,
            alpha_reg: None,
            sk_b: None,
            snapshot_every: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Completed,
    Failed,
}

/// Contents of `run.json`: the configuration, the fully resolved scenario and
/// the per-step convergence log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunRecord {
    pub config: RunConfig,
    pub scenario: ScenarioSpec,
    pub status: RunStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub steps: Vec<StepReport>,
}

impl RunRecord {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

/// The scenario with the configuration's density and material overrides applied.
pub fn resolve_scenario(config: &RunConfig) -> Result<ScenarioSpec, CliError> {
    let mut spec = match &config.source {
        ScenarioSource::Builtin(b) => build(*b, config.density.unwrap_or_default()),
        ScenarioSource::File(p) => ScenarioSpec::load(p)?,
    };
    if let Some(d) = config.density {
        spec.density = d;
    }
    let m = &mut spec.material;
    if let Some(k) = config.k_residual {
        m.k_residual = k;
    }
    if let Some(a) = config.alpha_reg {
        m.alpha_reg = a;
    }
    if let Some(b) = config.sk_b {
        m.sk_b = b;
    }
    if let Setup::Fem(f) = &mut spec.setup {
        f.controls.irreversible = config.irreversible;
    }
    spec.validate()?;
    Ok(spec)
}

/// Resolves and runs `config`, writing `history.csv`, `snapshots/` and
/// `run.json` under `config.out`. Artifacts written before a solver failure
/// are kept.
pub fn execute(config: &RunConfig) -> Result<RunRecord, CliError> {
    let spec = resolve_scenario(config)?;
    execute_spec(config, spec)
}

/// Re-runs a recorded run from its embedded scenario, optionally into another directory.
pub fn replay(record_path: &Path, out: Option<PathBuf>) -> Result<RunRecord, CliError> {
    let record = RunRecord::load(record_path)?;
    let mut config = record.config;
    if let Some(o) = out {
        config.out = o;
    }
    record.scenario.validate()?;
    execute_spec(&config, record.scenario)
}

fn snapshot(dir: &Path, step: usize, spec: &ScenarioSpec, mesh: &crackfield::fem::Mesh, st: &SolutionState) -> Result<(), CliError> {
    let path = dir.join(format!("step_{step:04}.vtk"));
    let file = File::create(&path).map_err(|e| CliError::io(path.display(), e))?;
    let title = format!("{} step {step}", spec.name);
    write_vtk(BufWriter::new(file), mesh, &st.u, &st.d, &title).map_err(|e| CliError::io(path.display(), e))
}

fn execute_spec(config: &RunConfig, spec: ScenarioSpec) -> Result<RunRecord, CliError> {
    let Some(fem) = spec.fem().cloned() else {
        return Err(CliError::Usage(format!("scenario '{}' is a constitutive sweep; use the sweep command", spec.name)));
    };
    let mut problem = spec.problem(config.model)?;
    let out = &config.out;
    let snaps = out.join("snapshots");
    fs::create_dir_all(&snaps).map_err(|e| CliError::io(snaps.display(), e))?;
    let hist_path = out.join("history.csv");
    let hist_file = File::create(&hist_path).map_err(|e| CliError::io(hist_path.display(), e))?;
    let mut hist = BufWriter::new(hist_file);
    writeln!(hist, "{HISTORY_HEADER}").map_err(|e| CliError::io(hist_path.display(), e))?;

    let mut steps: Vec<StepReport> = Vec::new();
    let result = problem.initial_state().map_err(CliError::from).and_then(|mut state| {
        snapshot(&snaps, 0, &spec, &problem.mesh, &state)?;
        let mesh = problem.mesh.clone();
        let mut io_err = None;
        let run = problem.run(&mut state, &fem.load, &fem.controls, |r, st| {
            steps.push(r.clone());
            eprintln!(
                "step {:>4}  load {:.6e}  iterations {:>3}  max d {:.4}{}",
                r.step,
                r.load,
                r.iterations,
                r.max_d,
                r.warning.as_deref().map(|w| format!("  warning: {w}")).unwrap_or_default()
            );
            let res = writeln!(hist, "{}", history_row(r))
                .and_then(|_| hist.flush())
                .map_err(|e| CliError::io(hist_path.display(), e))
                .and_then(|_| match config.snapshot_every {
                    k if k > 0 && r.step % k == 0 => snapshot(&snaps, r.step, &spec, &mesh, st),
                    _ => Ok(()),
                });
            res.map_err(|e| io_err = Some(e)).is_ok()
        });
        match io_err {
            Some(e) => Err(e),
            None => run.map(|_| ()).map_err(CliError::from),
        }
    });
    let record = RunRecord {
        config: config.clone(),
        scenario: spec.clone(),
        status: if result.is_ok() { RunStatus::Completed } else { RunStatus::Failed },
        error: result.as_ref().err().map(|e| e.to_string()),
        steps,
    };
    let json_path = out.join("run.json");
    let json = serde_json::to_string_pretty(&record).expect("run records serialize");
    fs::write(&json_path, json).map_err(|e| CliError::io(json_path.display(), e))?;
    result.map(|_| record)
}

/// Options of the `sweep` command.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepConfig {
    pub source: Option<ScenarioSource>,
    pub models: Option<Vec<ModelKind>>,
    pub points: Option<usize>,
    /// Explicit d values; replaces the equally spaced grid.
    pub grid: Option<Vec<f64>>,
}

/// CSV of σ12/(2με12) against d.
pub fn run_sweep(config: &SweepConfig) -> Result<String, CliError> {
    let mut spec = match &config.source {
        None => build(BuiltinScenario::ConstitutiveSweep2d, Density::Coarse),
        Some(ScenarioSource::Builtin(b)) => build(*b, Density::Coarse),
        Some(ScenarioSource::File(p)) => ScenarioSpec::load(p)?,
    };
    let Setup::Sweep(setup) = &mut spec.setup else {
        return Err(CliError::Usage(format!("scenario '{}' is not a constitutive sweep", spec.name)));
    };
    if let Some(m) = &config.models {
        setup.models = m.clone();
    }
    if let Some(p) = config.points {
        setup.points = p;
    }
    spec.validate()?;
    let Setup::Sweep(setup) = &spec.setup else { unreachable!() };
    let grid = config.grid.clone().unwrap_or_else(|| setup.grid());
    let table = constitutive_sweep(setup, &spec.material.params(), &grid).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(table.to_csv())
}
