//! Boundary conditions, load programs and the dof partition.

use serde::{Deserialize, Serialize};

use super::{FemError, Mesh};
use crate::tensor::Vec3;

/// Prescribed value of one displacement component as a function of the load parameter t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ComponentLoad {
    /// u = 0.
    Fixed,
    /// u = scale·t.
    Linear { scale: f64 },
    /// u = amp·sin t.
    Sin { amp: f64 },
    /// u = amp·(1 + cos t).
    OnePlusCos { amp: f64 },
}

impl ComponentLoad {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            ComponentLoad::Fixed => 0.0,
            ComponentLoad::Linear { scale } => scale * t,
            ComponentLoad::Sin { amp } => amp * t.sin(),
            ComponentLoad::OnePlusCos { amp } => amp * (1.0 + t.cos()),
        }
    }

    fn is_finite(&self) -> bool {
        match *self {
            ComponentLoad::Fixed => true,
            ComponentLoad::Linear { scale } => scale.is_finite(),
            ComponentLoad::Sin { amp } | ComponentLoad::OnePlusCos { amp } => amp.is_finite(),
        }
    }
}

/// Dirichlet data on a named node or edge set. A `None` component is traction free.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisplacementBc {
    pub set: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<ComponentLoad>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<ComponentLoad>,
}

/// d = 1 on a named node set. Elements with all nodes in the set use `normal` as crack normal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseDirichlet {
    pub set: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normal: Option<Vec3>,
}

/// One stretch of the load parameter: from the previous end up to `to`, in increments `step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadSegment {
    pub to: f64,
    pub step: f64,
}

/// Ordered load segments starting at `start`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadProgram {
    #[serde(default)]
    pub start: f64,
    /// Solve at `start` itself before the first increment.
    #[serde(default)]
    pub include_start: bool,
    #[serde(default)]
    pub segments: Vec<LoadSegment>,
}

impl LoadProgram {
    pub fn empty() -> Self {
        Self { start: 0.0, include_start: false, segments: Vec::new() }
    }

    pub fn uniform(to: f64, step: f64) -> Self {
        Self { start: 0.0, include_start: false, segments: vec![LoadSegment { to, step }] }
    }

    pub fn validate(&self) -> Result<(), FemError> {
        if !self.start.is_finite() {
            return Err(FemError::InvalidInput("load program start is not finite".into()));
        }
        let mut from = self.start;
        for (i, s) in self.segments.iter().enumerate() {
            if !(s.step > 0.0) || !s.step.is_finite() {
                return Err(FemError::InvalidInput(format!("load segment {i}: increment {} must be positive", s.step)));
            }
            if !(s.to > from) || !s.to.is_finite() {
                return Err(FemError::InvalidInput(format!("load segment {i}: end {} must exceed {from}", s.to)));
            }
            from = s.to;
        }
        Ok(())
    }

    /// The load values to solve at, in order. The last value of each segment is exactly `to`.
    pub fn values(&self) -> Vec<f64> {
        let mut out = Vec::new();
        if self.include_start {
            out.push(self.start);
        }
        let mut from = self.start;
        for s in &self.segments {
            let n = ((s.to - from) / s.step - 1e-9).ceil().max(1.0) as usize;
            for k in 1..n {
                out.push(from + k as f64 * s.step);
            }
            out.push(s.to);
            from = s.to;
        }
        out
    }
}

/// Constrained/free partition of scalar dofs and the prescribed values.
#[derive(Debug, Clone, PartialEq)]
pub struct DofSystem {
    pub constrained: Vec<bool>,
    pub values: Vec<f64>,
}

impl DofSystem {
    pub fn free(n: usize) -> Self {
        Self { constrained: vec![false; n], values: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.constrained.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constrained.is_empty()
    }

    pub fn constrain(&mut self, dof: usize, value: f64) {
        self.constrained[dof] = true;
        self.values[dof] = value;
    }

    pub fn n_free(&self) -> usize {
        self.constrained.iter().filter(|c| !**c).count()
    }

    /// Writes prescribed values into `x`.
    pub fn impose(&self, x: &mut [f64]) {
        for (i, xi) in x.iter_mut().enumerate() {
            if self.constrained[i] {
                *xi = self.values[i];
            }
        }
    }

    /// Displacement dofs (2 per node, x then y) at load parameter t.
    pub fn displacement(mesh: &Mesh, bcs: &[DisplacementBc], t: f64) -> Result<Self, FemError> {
        let mut dofs = Self::free(2 * mesh.n_nodes());
        for bc in bcs {
            let nodes = mesh
                .set_nodes(&bc.set)
                .ok_or_else(|| FemError::InvalidInput(format!("boundary set '{}' not in mesh", bc.set)))?;
            for (c, load) in [bc.x, bc.y].iter().enumerate() {
                if let Some(load) = load {
                    if !load.is_finite() {
                        return Err(FemError::InvalidInput(format!("boundary '{}' has a non-finite load", bc.set)));
                    }
                    for &i in &nodes {
                        dofs.constrain(2 * i + c, load.value(t));
                    }
                }
            }
        }
        Ok(dofs)
    }
}
