//! Graded structured triangulations with optional slits.

use serde::{Deserialize, Serialize};

use crate::fem::Mesh;

/// Axis-aligned rectangle [x0, x1] × [y0, y1] in mm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn contains(&self, p: [f64; 2], tol: f64) -> bool {
        p[0] >= self.x0 - tol && p[0] <= self.x1 + tol && p[1] >= self.y0 - tol && p[1] <= self.y1 + tol
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }
}

/// An interval [from, to] along one axis meshed with spacing `size`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Zone {
    pub from: f64,
    pub to: f64,
    pub size: f64,
}

/// Spacing along one axis: `size` away from zones, growing linearly with
/// slope `grading` out of each zone. `lines` are forced grid lines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub size: f64,
    #[serde(default)]
    pub zones: Vec<Zone>,
    #[serde(default)]
    pub lines: Vec<f64>,
    #[serde(default = "default_grading")]
    pub grading: f64,
}

fn default_grading() -> f64 {
    0.25
}

impl AxisSpec {
    pub fn uniform(size: f64) -> Self {
        Self { size, zones: Vec::new(), lines: Vec::new(), grading: default_grading() }
    }

    /// Local target spacing at x.
    pub fn spacing(&self, x: f64) -> f64 {
        self.zones.iter().fold(self.size, |h, z| {
            let dist = (z.from - x).max(x - z.to).max(0.0);
            h.min(z.size + self.grading * dist)
        })
    }

    /// Divides every zone size by `factor`.
    pub fn refined(&self, factor: f64) -> Self {
        let mut s = self.clone();
        for z in &mut s.zones {
            z.size /= factor;
        }
        s
    }

    /// Grid coordinates on [a, b], including a, b and every forced line inside.
    pub fn coordinates(&self, a: f64, b: f64) -> Vec<f64> {
        let tol = 1e-9 * (b - a).abs().max(1.0);
        let mut breaks: Vec<f64> = vec![a, b];
        breaks.extend(self.lines.iter().copied().filter(|&x| x > a + tol && x < b - tol));
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|x, y| (*x - *y).abs() < tol);
        let mut out = vec![a];
        for w in breaks.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            // equidistribute ∫ dx / h(x)
            const SAMPLES: usize = 2000;
            let dx = (hi - lo) / SAMPLES as f64;
            let mut cum = vec![0.0; SAMPLES + 1];
            for k in 0..SAMPLES {
                let xm = lo + (k as f64 + 0.5) * dx;
                cum[k + 1] = cum[k] + dx / self.spacing(xm);
            }
            let total = cum[SAMPLES];
            let n = (total - 1e-6).ceil().max(1.0) as usize;
            let mut k = 0;
            for j in 1..n {
                let target = total * j as f64 / n as f64;
                while cum[k + 1] < target {
                    k += 1;
                }
                let frac = (target - cum[k]) / (cum[k + 1] - cum[k]);
                out.push(lo + (k as f64 + frac) * dx);
            }
            out.push(hi);
        }
        out
    }
}

/// A straight traction-free cut along grid lines. Nodes strictly before the
/// tip are duplicated; elements on the positive side use the copies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Slit {
    pub from: [f64; 2],
    pub to: [f64; 2],
}

impl Slit {
    pub fn is_horizontal(&self) -> bool {
        self.from[1] == self.to[1]
    }

    pub fn is_vertical(&self) -> bool {
        self.from[0] == self.to[0]
    }
}

/// Union-jack triangulation of the tensor grid xs × ys: two triangles per
/// cell, diagonals alternating in a checkerboard.
pub fn structured(xs: &[f64], ys: &[f64]) -> Mesh {
    let (nx, ny) = (xs.len(), ys.len());
    let id = |i: usize, j: usize| j * nx + i;
    let mut nodes = Vec::with_capacity(nx * ny);
    for &y in ys {
        for &x in xs {
            nodes.push([x, y]);
        }
    }
    let mut tris = Vec::with_capacity(2 * (nx - 1) * (ny - 1));
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if (i + j) % 2 == 0 {
                tris.push([a, b, c]);
                tris.push([a, c, d]);
            } else {
                tris.push([a, b, d]);
                tris.push([b, c, d]);
            }
        }
    }
    Mesh::new(nodes, tris)
}

/// Cuts `slit` into `mesh`. Both ends must lie on grid nodes; the end listed
/// as `to` is the tip and stays shared.
pub fn cut_slit(mesh: &mut Mesh, slit: &Slit, tol: f64) {
    let horizontal = slit.is_horizontal();
    let (axis, other) = if horizontal { (0, 1) } else { (1, 0) };
    let line = slit.from[other];
    let (lo, hi) = (slit.from[axis].min(slit.to[axis]), slit.from[axis].max(slit.to[axis]));
    let tip = slit.to[axis];
    let on_cut = |p: [f64; 2]| (p[other] - line).abs() <= tol && p[axis] >= lo - tol && p[axis] <= hi + tol && (p[axis] - tip).abs() > tol;
    let mut copy = vec![usize::MAX; mesh.n_nodes()];
    for i in 0..mesh.n_nodes() {
        if on_cut(mesh.nodes[i]) {
            copy[i] = mesh.nodes.len();
            let p = mesh.nodes[i];
            mesh.nodes.push(p);
        }
    }
    for e in 0..mesh.n_elements() {
        let c = mesh.centroid(e);
        if c[other] > line && c[axis] >= lo - tol && c[axis] <= hi + tol {
            for k in 0..3 {
                let i = mesh.triangles[e][k];
                if i < copy.len() && copy[i] != usize::MAX {
                    mesh.triangles[e][k] = copy[i];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_axis() {
        let xs = AxisSpec::uniform(0.25).coordinates(0.0, 1.0);
        assert_eq!(xs.len(), 5);
        assert!((xs[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn graded_axis_is_fine_inside_zone() {
        let spec = AxisSpec {
            size: 50.0,
            zones: vec![Zone { from: 450.0, to: 550.0, size: 10.0 }],
            lines: vec![495.0, 505.0],
            grading: 0.25,
        };
        let ys = spec.coordinates(0.0, 1000.0);
        assert!(ys.contains(&495.0) && ys.contains(&505.0));
        for w in ys.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            assert!(w[1] > w[0]);
            assert!(w[1] - w[0] <= 1.05 * spec.spacing(mid) + 1e-9, "{w:?}");
        }
    }

    #[test]
    fn structured_mesh_is_valid() {
        let m = structured(&[0.0, 1.0, 2.0], &[0.0, 1.0, 3.0]);
        assert_eq!(m.n_elements(), 8);
        m.validate().unwrap();
    }

    #[test]
    fn slit_separates_faces() {
        let xs: Vec<f64> = (0..=4).map(|i| i as f64).collect();
        let mut m = structured(&xs, &xs);
        let before = m.n_nodes();
        cut_slit(&mut m, &Slit { from: [0.0, 2.0], to: [2.0, 2.0] }, 1e-9);
        // nodes (0,2) and (1,2) are doubled; the tip (2,2) is shared
        assert_eq!(m.n_nodes(), before + 2);
        m.validate().unwrap();
        let edges = m.boundary_edges();
        let on_slit = edges.iter().filter(|e| m.nodes[e[0]][1] == 2.0 && m.nodes[e[1]][1] == 2.0).count();
        assert_eq!(on_slit, 4);
    }
}
