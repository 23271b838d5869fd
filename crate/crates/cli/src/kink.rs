//! Crack kink angle read off phase-field snapshots.
//!
//! Cells whose mean d reaches the threshold after onset, within `radius` of
//! the pre-crack tip, are fitted with an area-weighted least-squares line.
//! The line is oriented away from the tip. The angle is signed, measured from
//! the pre-crack direction, counterclockwise positive.

use std::fs;
use std::io::BufReader;
use std::path::Path;

use crackfield::fem::Mesh;
use crackfield::io::{read_vtk, VtkSnapshot};
use crackfield::scenarios::CrackSpec;

use crate::run::RunRecord;
use crate::CliError;

pub const RIDGE_THRESHOLD: f64 = 0.9;

/// Pre-crack tip, unit direction of the pre-crack towards the tip, and the search radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ridge {
    pub tip: [f64; 2],
    pub direction: [f64; 2],
    pub radius: f64,
}

impl Ridge {
    /// Ridge search for a slit from `from` to the tip `to`.
    pub fn from_slit(from: [f64; 2], to: [f64; 2], radius: f64) -> Self {
        let (dx, dy) = (to[0] - from[0], to[1] - from[1]);
        let n = dx.hypot(dy);
        Self { tip: to, direction: [dx / n, dy / n], radius }
    }
}

fn element_means(mesh: &Mesh, d: &[f64]) -> Vec<f64> {
    mesh.triangles.iter().map(|t| (d[t[0]] + d[t[1]] + d[t[2]]) / 3.0).collect()
}

/// Cells that crossed the threshold between `baseline` and `d`, as
/// (offset from the tip, area).
fn new_cells(mesh: &Mesh, baseline: &[f64], d: &[f64], ridge: &Ridge) -> Vec<([f64; 2], f64)> {
    let before = element_means(mesh, baseline);
    let after = element_means(mesh, d);
    let geom = mesh.geometry();
    (0..mesh.n_elements())
        .filter(|&e| after[e] >= RIDGE_THRESHOLD && before[e] < RIDGE_THRESHOLD)
        .filter_map(|e| {
            let c = mesh.centroid(e);
            let r = [c[0] - ridge.tip[0], c[1] - ridge.tip[1]];
            (r[0].hypot(r[1]) <= ridge.radius).then_some((r, geom[e].area))
        })
        .collect()
}

/// Signed angle in degrees of the fitted ridge, or None when no cell qualifies.
pub fn ridge_angle(mesh: &Mesh, baseline: &[f64], d: &[f64], ridge: &Ridge) -> Option<f64> {
    let cells = new_cells(mesh, baseline, d, ridge);
    if cells.is_empty() {
        return None;
    }
    let total: f64 = cells.iter().map(|(_, w)| w).sum();
    let c = cells.iter().fold([0.0, 0.0], |m, (r, w)| [m[0] + w * r[0] / total, m[1] + w * r[1] / total]);
    // principal axis of the second moment about the weighted centroid
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (r, w) in &cells {
        let (x, y) = (r[0] - c[0], r[1] - c[1]);
        sxx += w * x * x;
        sxy += w * x * y;
        syy += w * y * y;
    }
    let phi = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let mut v = [phi.cos(), phi.sin()];
    if c[0] * v[0] + c[1] * v[1] < 0.0 {
        v = [-v[0], -v[1]];
    }
    let s = ridge.direction;
    let cross = s[0] * v[1] - s[1] * v[0];
    let dot = s[0] * v[0] + s[1] * v[1];
    Some(cross.atan2(dot).to_degrees())
}

/// Maximum-hoop-stress kink angle in degrees for the ratio K_I/K_II, using
/// the + root of 2·atan{(K_I/K_II ± √((K_I/K_II)² + 8))/4}.
pub fn mixed_mode_angle(ki_over_kii: f64) -> f64 {
    let r = ki_over_kii;
    (2.0 * ((r + (r * r + 8.0).sqrt()) / 4.0).atan()).to_degrees()
}

#[derive(Debug, Clone, PartialEq)]
pub struct KinkAngle {
    pub degrees: f64,
    /// First snapshot step with a qualifying cell.
    pub onset_step: usize,
    /// Snapshot step the angle was read from.
    pub step: usize,
    pub cells: usize,
}

/// Kink angle over a sequence of (step, snapshot) pairs sorted by step. The
/// first snapshot is the baseline. The angle is read from the first snapshot
/// whose new cells reach 3/4 of the radius, or the last one.
pub fn kink_angle(snapshots: &[(usize, VtkSnapshot)], ridge: &Ridge) -> Result<KinkAngle, CliError> {
    let Some((_, base)) = snapshots.first() else {
        return Err(CliError::Kink("no snapshots".into()));
    };
    let mut onset = None;
    let mut chosen = None;
    for (step, snap) in &snapshots[1..] {
        if snap.mesh.n_nodes() != base.mesh.n_nodes() {
            return Err(CliError::Kink(format!("snapshot {step} has a different mesh")));
        }
        let cells = new_cells(&snap.mesh, &base.d, &snap.d, ridge);
        if cells.is_empty() {
            continue;
        }
        onset.get_or_insert(*step);
        let reach = cells.iter().fold(0.0f64, |m, (r, _)| m.max(r[0].hypot(r[1])));
        chosen = Some((*step, snap, cells.len()));
        if reach >= 0.75 * ridge.radius {
            break;
        }
    }
    let (Some(onset_step), Some((step, snap, cells))) = (onset, chosen) else {
        return Err(CliError::Kink(format!(
            "no propagation: no cell reached d >= {RIDGE_THRESHOLD} within {} of the tip",
            ridge.radius
        )));
    };
    let degrees = ridge_angle(&snap.mesh, &base.d, &snap.d, ridge).expect("cells exist");
    Ok(KinkAngle { degrees, onset_step, step, cells })
}

/// Kink angle of a run directory holding `run.json` and `snapshots/step_*.vtk`.
/// The scenario must have a slit pre-crack; the radius is 3ℓ.
pub fn kink_angle_from_dir(dir: &Path) -> Result<KinkAngle, CliError> {
    let record = RunRecord::load(&dir.join("run.json"))?;
    let Some(CrackSpec::Slit { from, to }) = record.scenario.fem().and_then(|f| f.crack.clone()) else {
        return Err(CliError::Kink("kink angles need a scenario with a slit pre-crack".into()));
    };
    let ridge = Ridge::from_slit(from, to, 3.0 * record.scenario.material.ell);
    let snap_dir = dir.join("snapshots");
    let entries = fs::read_dir(&snap_dir).map_err(|e| CliError::io(snap_dir.display(), e))?;
    let mut files: Vec<(usize, std::path::PathBuf)> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter_map(|p| {
            let name = p.file_name()?.to_str()?;
            let step = name.strip_prefix("step_")?.strip_suffix(".vtk")?.parse().ok()?;
            Some((step, p))
        })
        .collect();
    files.sort_by_key(|(s, _)| *s);
    let snapshots = files
        .into_iter()
        .map(|(s, p)| {
            let f = fs::File::open(&p).map_err(|e| CliError::io(p.display(), e))?;
            let snap = read_vtk(BufReader::new(f)).map_err(|e| CliError::Kink(format!("{}: {e}", p.display())))?;
            Ok((s, snap))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    kink_angle(&snapshots, &ridge)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crackfield::scenarios::structured;

    #[test]
    fn pure_mode_two_reference() {
        // roots of K_I sin θ + K_II (3 cos θ − 1) = 0 with K_I = 0
        let expected = (1.0f64 / 3.0).acos().to_degrees();
        assert!((mixed_mode_angle(0.0) - expected).abs() < 1e-12);
        assert!((mixed_mode_angle(0.0) - 70.5288).abs() < 1e-4);
    }

    fn grid() -> Mesh {
        let xs: Vec<f64> = (0..=40).map(|i| i as f64 * 0.5).collect();
        structured(&xs, &xs)
    }

    fn ridge_field(mesh: &Mesh, tip: [f64; 2], angle_deg: f64) -> Vec<f64> {
        let t = angle_deg.to_radians();
        let v = [t.cos(), t.sin()];
        mesh.nodes
            .iter()
            .map(|p| {
                let r = [p[0] - tip[0], p[1] - tip[1]];
                let along = r[0] * v[0] + r[1] * v[1];
                let off = (r[0] * v[1] - r[1] * v[0]).abs();
                if along >= 0.0 && off <= 0.8 {
                    1.0
                } else {
                    0.0
                }
            })
            .collect()
    }

    #[test]
    fn synthetic_45_degree_ridge() {
        let mesh = grid();
        let ridge = Ridge::from_slit([0.0, 10.0], [10.0, 10.0], 8.0);
        let d = ridge_field(&mesh, ridge.tip, 45.0);
        let a = ridge_angle(&mesh, &vec![0.0; d.len()], &d, &ridge).unwrap();
        assert!((a - 45.0).abs() < 1.0, "{a}");
    }

    #[test]
    fn downward_ridge_is_negative() {
        let mesh = grid();
        let ridge = Ridge::from_slit([0.0, 10.0], [10.0, 10.0], 8.0);
        let d = ridge_field(&mesh, ridge.tip, -70.0);
        let a = ridge_angle(&mesh, &vec![0.0; d.len()], &d, &ridge).unwrap();
        assert!((a + 70.0).abs() < 2.0, "{a}");
    }

    #[test]
    fn no_growth_is_an_error() {
        let mesh = grid();
        let ridge = Ridge::from_slit([0.0, 10.0], [10.0, 10.0], 8.0);
        let snap = VtkSnapshot { mesh: mesh.clone(), d: vec![0.0; mesh.n_nodes()], u: vec![0.0; 2 * mesh.n_nodes()] };
        let err = kink_angle(&[(0, snap.clone()), (1, snap)], &ridge).unwrap_err();
        assert!(err.to_string().contains("no propagation"));
    }
}
