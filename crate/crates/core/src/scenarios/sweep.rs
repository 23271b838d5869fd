//! Pointwise shear-stiffness sweeps σ12/(2με12) against d.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constitutive::tables::{calibrate_phase, CalibrationTable, CrackShape};
use crate::constitutive::{evaluate, ConstitutiveError, MaterialParams, ModelKind, PhasePoint};
use crate::tensor::SymTensor3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    /// ε = ε12(e1⊗e2 + e2⊗e1).
    TwoD,
    /// The 2D strain plus ε33 e3⊗e3.
    ThreeD,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSetup {
    pub kind: SweepKind,
    pub eps12: f64,
    #[serde(default)]
    pub eps33: f64,
    /// Number of equally spaced d values on [0, 1].
    pub points: usize,
    pub models: Vec<ModelKind>,
    /// Crack length ratio of the reference cell; reported with its calibrated d.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_a: Option<f64>,
}

impl SweepSetup {
    pub fn paper(kind: SweepKind) -> Self {
        Self {
            kind,
            eps12: 1e-3,
            eps33: if kind == SweepKind::ThreeD { -1e-6 } else { 0.0 },
            points: 101,
            models: ModelKind::ALL.to_vec(),
            r_a: Some(0.4),
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        let n = self.points.max(2) - 1;
        (0..=n).map(|i| i as f64 / n as f64).collect()
    }

    /// d matching `r_a` through the plane-strain calibration table.
    pub fn calibrated_d(&self) -> Result<Option<f64>, ConstitutiveError> {
        self.r_a.map(|ra| calibrate_phase(ra, CrackShape::PlaneStrain, CalibrationTable::builtin())).transpose()
    }

    pub(crate) fn validate(&self) -> Result<(), super::ScenarioError> {
        let bad = |f: &str, m: &str| Err(super::invalid(f, m));
        if !(self.eps12 != 0.0 && self.eps12.is_finite()) {
            return bad("setup.eps12", "must be finite and nonzero");
        }
        if !self.eps33.is_finite() {
            return bad("setup.eps33", "must be finite");
        }
        if self.kind == SweepKind::TwoD && self.eps33 != 0.0 {
            return bad("setup.eps33", "must be 0 for a 2D sweep");
        }
        if self.points < 2 {
            return bad("setup.points", "need at least 2 points");
        }
        if self.models.is_empty() {
            return bad("setup.models", "need at least one model");
        }
        if self.calibrated_d().is_err() {
            return bad("setup.r_a", "outside the calibration table");
        }
        Ok(())
    }
}

/// σ12/(2με12) at one d with crack normal e2 and regularization factor 1.
pub fn sweep_ratio(
    kind: SweepKind,
    model: ModelKind,
    mat: &MaterialParams,
    d: f64,
    eps12: f64,
    eps33: f64,
) -> Result<f64, ConstitutiveError> {
    let e33 = if kind == SweepKind::ThreeD { eps33 } else { 0.0 };
    let eps = SymTensor3::new(0.0, 0.0, e33, 0.0, 0.0, eps12);
    let out = evaluate(model, &eps, &PhasePoint::with_normal(d, [0.0, 1.0, 0.0]), mat)?;
    Ok(out.sigma.get(0, 1) / (2.0 * mat.mu * eps12))
}

/// Ratios per model on a d grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub d: Vec<f64>,
    pub columns: Vec<(ModelKind, Vec<f64>)>,
}

impl SweepTable {
    pub fn column(&self, model: ModelKind) -> Option<&[f64]> {
        self.columns.iter().find(|(m, _)| *m == model).map(|(_, c)| c.as_slice())
    }

    /// CSV with a `d` column and one column per model, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("d");
        for (m, _) in &self.columns {
            s.push(',');
            s.push_str(m.name());
        }
        s.push('\n');
        for (i, d) in self.d.iter().enumerate() {
            s.push_str(&crate::io::fmt_f64(*d));
            for (_, c) in &self.columns {
                s.push(',');
                s.push_str(&crate::io::fmt_f64(c[i]));
            }
            s.push('\n');
        }
        s
    }
}

pub fn constitutive_sweep(setup: &SweepSetup, mat: &MaterialParams, d_grid: &[f64]) -> Result<SweepTable, ConstitutiveError> {
    if let Some(d) = d_grid.iter().find(|d| !(0.0..=1.0).contains(*d)) {
        return Err(ConstitutiveError::InvalidInput(format!("sweep grid value {d} outside [0, 1]")));
    }
    let columns = setup
        .models
        .par_iter()
        .map(|&m| {
            let col = d_grid
                .iter()
                .map(|&d| sweep_ratio(setup.kind, m, mat, d, setup.eps12, setup.eps33))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((m, col))
        })
        .collect::<Result<Vec<_>, ConstitutiveError>>()?;
    Ok(SweepTable { d: d_grid.to_vec(), columns })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat() -> MaterialParams {
        MaterialParams { k_residual: 0.0, ..MaterialParams::new(1153.8, 769.23, 1.0, 1.0) }
    }

    #[test]
    fn isotropic_half_damage() {
        let r = sweep_ratio(SweepKind::TwoD, ModelKind::Isotropic, &mat(), 0.5, 1e-3, 0.0).unwrap();
        assert!((r - 0.25).abs() < 1e-14);
    }

    #[test]
    fn endpoints() {
        let m = mat();
        let s = |model, d| sweep_ratio(SweepKind::TwoD, model, &m, d, 1e-3, 0.0).unwrap();
        assert!((s(ModelKind::Spectral, 1.0) - 0.5).abs() < 1e-14);
        assert_eq!(s(ModelKind::Proposed, 1.0), 0.0);
        assert!((s(ModelKind::Proposed, 0.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn grid_rejects_out_of_range() {
        let setup = SweepSetup::paper(SweepKind::TwoD);
        assert!(constitutive_sweep(&setup, &mat(), &[0.0, 1.5]).is_err());
        assert_eq!(setup.grid().len(), 101);
    }

    #[test]
    fn calibrated_d_of_paper_cell() {
        let d = SweepSetup::paper(SweepKind::ThreeD).calibrated_d().unwrap().unwrap();
        assert_eq!(d, 0.1242);
    }
}
