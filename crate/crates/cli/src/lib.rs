//! Library side of the `crackfield` command: run configuration, artifact
//! writing, degradation sweeps and crack-kink extraction.

pub mod kink;
pub mod run;

pub use kink::{kink_angle_from_dir, mixed_mode_angle, ridge_angle, KinkAngle, Ridge};
pub use run::{execute, replay, resolve_scenario, run_sweep, RunConfig, RunRecord, RunStatus, ScenarioSource, SweepConfig};

use crackfield::fem::FemError;
use crackfield::scenarios::ScenarioError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
    #[error("{0}")]
    Kink(String),
}

impl CliError {
    /// 2 for usage errors, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(context: impl std::fmt::Display, source: std::io::Error) -> Self {
        CliError::Io { context: context.to_string(), source }
    }
}

impl From<FemError> for CliError {
    fn from(e: FemError) -> Self {
        match e {
            FemError::UnsupportedModel(_) | FemError::InvalidInput(_) => CliError::Usage(e.to_string()),
            other => CliError::Solver(other.to_string()),
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Parse(_) | ScenarioError::Invalid { .. } => CliError::Usage(e.to_string()),
            ScenarioError::Fem(f) => f.into(),
            ScenarioError::Io(io) => CliError::io("reading scenario", io),
        }
    }
}
