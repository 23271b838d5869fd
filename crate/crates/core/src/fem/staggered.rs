//! Alternate minimization in u and d, and load-program driving.

use serde::{Deserialize, Serialize};

use super::bc::LoadProgram;
use super::problem::Problem;
use super::FemError;

/// Solver controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Controls {
    /// Stop alternating once max nodal |Δd| between d-solves is below this.
    pub tol_stag: f64,
    pub max_stag: usize,
    /// Keep d ≥ d at the end of the previous step.
    pub irreversible: bool,
    pub max_newton: usize,
    /// Stop the program once the first boundary's force falls below this
    /// fraction of its peak.
    pub stop_fraction: Option<f64>,
}

impl Default for Controls {
    fn default() -> Self {
        Self { tol_stag: 1e-5, max_stag: 200, irreversible: true, max_newton: 25, stop_fraction: None }
    }
}

impl Controls {
    pub fn validate(&self) -> Result<(), FemError> {
        if !(self.tol_stag > 0.0) || self.max_stag == 0 || self.max_newton == 0 {
            return Err(FemError::InvalidInput("tolerances and iteration caps must be positive".into()));
        }
        if let Some(f) = self.stop_fraction {
            if !(0.0..1.0).contains(&f) {
                return Err(FemError::InvalidInput(format!("stop_fraction {f} outside [0, 1)")));
            }
        }
        Ok(())
    }
}

/// Nodal fields of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionState {
    /// Displacements, x and y interleaved per node.
    pub u: Vec<f64>,
    pub d: Vec<f64>,
    /// d at the end of the last completed step.
    pub d_prev: Vec<f64>,
    /// Resultant force on each boundary condition's set.
    pub reactions: Vec<[f64; 2]>,
}

/// Record of one load step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub step: usize,
    pub load: f64,
    /// Staggered iterations used.
    pub iterations: usize,
    /// Newton iterations summed over all subproblem solves.
    pub newton_iterations: usize,
    pub converged: bool,
    /// Π after every half-step, starting from the state with the new boundary data.
    pub energies: Vec<f64>,
    pub reactions: Vec<[f64; 2]>,
    pub max_d: f64,
    pub elastic_energy: f64,
    pub fracture_energy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl StepReport {
    /// Largest increase of Π between consecutive half-steps.
    pub fn max_energy_increase(&self) -> f64 {
        self.energies.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Step reports of a run, in order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct History {
    pub steps: Vec<StepReport>,
}

impl Problem {
    /// Unloaded equilibrium: u = 0, d = 1 on crack nodes and the
    /// minimizing profile elsewhere. This profile is the irreversibility floor
    /// of the first step.
    pub fn initial_state(&mut self) -> Result<SolutionState, FemError> {
        let mut d: Vec<f64> = self.crack_nodes().iter().map(|&c| if c { 1.0 } else { 0.0 }).collect();
        let u = vec![0.0; 2 * self.mesh.n_nodes()];
        if self.crack_nodes().iter().any(|&c| c) {
            let zero = vec![0.0; d.len()];
            self.solve_d(&u, &mut d, &zero, 100)?;
        }
        Ok(SolutionState { u, d_prev: d.clone(), d, reactions: vec![[0.0; 2]; self.bcs.len()] })
    }

    /// Minimizes over u at load `t` with d held fixed, and updates the
    /// reactions. Returns Π.
    pub fn solve_displacement(&mut self, state: &mut SolutionState, t: f64, max_newton: usize) -> Result<f64, FemError> {
        let dofs = self.displacement_dofs(t)?;
        dofs.impose(&mut state.u);
        let us = self.solve_u(&mut state.u, &state.d, &dofs, max_newton)?;
        state.reactions = self.reactions(&us.internal);
        Ok(us.energy)
    }

    /// Minimizes over d with u held fixed, bounded below by `d_prev` when
    /// `irreversible`. Returns Π.
    pub fn solve_phase_field(&mut self, state: &mut SolutionState, irreversible: bool) -> Result<f64, FemError> {
        let lower = if irreversible { state.d_prev.clone() } else { vec![0.0; state.d.len()] };
        Ok(self.solve_d(&state.u, &mut state.d, &lower, 100)?.energy)
    }

    /// Solves one load step at load parameter `t` starting from `state`.
    pub fn staggered_step(
        &mut self,
        state: &mut SolutionState,
        step: usize,
        t: f64,
        controls: &Controls,
    ) -> Result<StepReport, FemError> {
        let dofs = self.displacement_dofs(t)?;
        dofs.impose(&mut state.u);
        let lower = if controls.irreversible { state.d_prev.clone() } else { vec![0.0; state.d.len()] };
        let mut energies = vec![self.energy(&state.u, &state.d)?];
        let mut converged = false;
        let mut iterations = 0;
        let mut newton = 0;
        while iterations < controls.max_stag {
            iterations += 1;
            let us = self.solve_u(&mut state.u, &state.d, &dofs, controls.max_newton)?;
            energies.push(us.energy);
            newton += us.iterations;
            let before = state.d.clone();
            let ds = self.solve_d(&state.u, &mut state.d, &lower, 4 * controls.max_newton)?;
            energies.push(ds.energy);
            newton += ds.iterations;
            let change = before.iter().zip(&state.d).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            if change < controls.tol_stag {
                converged = true;
                break;
            }
        }
        let us = self.solve_u(&mut state.u, &state.d, &dofs, controls.max_newton)?;
        energies.push(us.energy);
        newton += us.iterations;
        state.reactions = self.reactions(&us.internal);
        state.d_prev.clone_from(&state.d);
        let elastic = self.elastic_energy(&state.u, &state.d)?;
        let warning = (!converged)
            .then(|| format!("staggered iteration cap {} reached at load {t}", controls.max_stag));
        Ok(StepReport {
            step,
            load: t,
            iterations,
            newton_iterations: newton,
            converged,
            energies,
            reactions: state.reactions.clone(),
            max_d: state.d.iter().fold(0.0f64, |m, &x| m.max(x)),
            elastic_energy: elastic,
            fracture_energy: self.fracture_energy(&state.d),
            warning,
        })
    }

    /// Runs every load value of `program` from `state`. `on_step` sees each
    /// finished step and returns false to stop early. Errors carry the failing
    /// step's index and load.
    pub fn run(
        &mut self,
        state: &mut SolutionState,
        program: &LoadProgram,
        controls: &Controls,
        mut on_step: impl FnMut(&StepReport, &SolutionState) -> bool,
    ) -> Result<History, FemError> {
        program.validate()?;
        controls.validate()?;
        let mut history = History::default();
        let mut peak: f64 = 0.0;
        for (k, t) in program.values().into_iter().enumerate() {
            let report = self
                .staggered_step(state, k + 1, t, controls)
                .map_err(|e| FemError::Step { step: k + 1, load: t, source: Box::new(e) })?;
            let go_on = on_step(&report, state);
            let force = report.reactions.first().map(|r| r[0].hypot(r[1])).unwrap_or(0.0);
            history.steps.push(report);
            if !go_on {
                break;
            }
            if let Some(frac) = controls.stop_fraction {
                if force < frac * peak {
                    break;
                }
            }
            peak = peak.max(force);
        }
        Ok(history)
    }
}
