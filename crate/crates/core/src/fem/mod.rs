//! Plane-strain P1 finite elements for the coupled u-d problem.
//!
//! The displacement and phase-field subproblems are minimized alternately
//! ([`Problem::staggered_step`]). Both use one-point quadrature for Ψ; the
//! d²/ℓ term uses the consistent P1 mass matrix. Constrained dofs are replaced
//! by identity rows so one sparsity pattern, and one symbolic factorization,
//! serves every solve.

mod bc;
mod mesh;
mod problem;
mod sparse;
mod staggered;

pub use bc::{ComponentLoad, DisplacementBc, DofSystem, LoadProgram, LoadSegment, PhaseDirichlet};
pub use mesh::{ElementGeom, Mesh};
pub use problem::Problem;
pub use sparse::{SolveFailure, SparseSystem};
pub use staggered::{Controls, History, SolutionState, StepReport};

use crate::constitutive::{ConstitutiveError, ModelKind};

#[derive(Debug, thiserror::Error)]
pub enum FemError {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Constitutive(#[from] ConstitutiveError),
    #[error("model {0} has no energy and cannot drive the phase-field subproblem")]
    UnsupportedModel(ModelKind),
    #[error("{system} system is singular: {nodes} nodes near ({x:.4}, {y:.4}) form a floating subdomain")]
    FloatingSubdomain { system: &'static str, nodes: usize, x: f64, y: f64 },
    #[error("{0} system is singular")]
    Singular(&'static str),
    #[error("step {step} (load {load}): {source}")]
    Step {
        step: usize,
        load: f64,
        #[source]
        source: Box<FemError>,
    },
}
