//! Triangle meshes with named node and edge sets.

use std::collections::BTreeMap;

use super::FemError;

/// P1 triangle mesh in the x-y plane. Coordinates in mm.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Mesh {
    pub nodes: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub node_sets: BTreeMap<String, Vec<usize>>,
    pub edge_sets: BTreeMap<String, Vec<[usize; 2]>>,
}

/// Area and constant shape-function gradients of one triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementGeom {
    pub area: f64,
    /// ∇N_i for the three local nodes.
    pub grad: [[f64; 2]; 3],
}

impl ElementGeom {
    pub fn new(p: [[f64; 2]; 3]) -> Self {
        let [a, b, c] = p;
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        let area = 0.5 * det;
        let grad = [
            [(b[1] - c[1]) / det, (c[0] - b[0]) / det],
            [(c[1] - a[1]) / det, (a[0] - c[0]) / det],
            [(a[1] - b[1]) / det, (b[0] - a[0]) / det],
        ];
        Self { area, grad }
    }

    /// Gradient of a P1 field with nodal values `v`.
    pub fn gradient(&self, v: [f64; 3]) -> [f64; 2] {
        let mut g = [0.0; 2];
        for (i, vi) in v.iter().enumerate() {
            g[0] += self.grad[i][0] * vi;
            g[1] += self.grad[i][1] * vi;
        }
        g
    }
}

impl Mesh {
    pub fn new(nodes: Vec<[f64; 2]>, triangles: Vec<[usize; 3]>) -> Self {
        Self { nodes, triangles, ..Default::default() }
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_elements(&self) -> usize {
        self.triangles.len()
    }

    pub fn corners(&self, e: usize) -> [[f64; 2]; 3] {
        self.triangles[e].map(|i| self.nodes[i])
    }

    pub fn centroid(&self, e: usize) -> [f64; 2] {
        let p = self.corners(e);
        [(p[0][0] + p[1][0] + p[2][0]) / 3.0, (p[0][1] + p[1][1] + p[2][1]) / 3.0]
    }

    pub fn geometry(&self) -> Vec<ElementGeom> {
        (0..self.n_elements()).map(|e| ElementGeom::new(self.corners(e))).collect()
    }

    pub fn validate(&self) -> Result<(), FemError> {
        let n = self.n_nodes();
        let bad = |msg: String| Err(FemError::InvalidMesh(msg));
        if let Some(i) = self.nodes.iter().position(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return bad(format!("node {i} has non-finite coordinates"));
        }
        for (e, t) in self.triangles.iter().enumerate() {
            if t.iter().any(|&i| i >= n) {
                return bad(format!("element {e} references a node outside 0..{n}"));
            }
            let area = ElementGeom::new(self.corners(e)).area;
            if !(area > 0.0) {
                return bad(format!("element {e} has non-positive area {area:e}"));
            }
        }
        for (name, set) in &self.node_sets {
            if let Some(i) = set.iter().find(|&&i| i >= n) {
                return bad(format!("node set '{name}' references node {i}"));
            }
        }
        for (name, set) in &self.edge_sets {
            if let Some(e) = set.iter().find(|e| e[0] >= n || e[1] >= n) {
                return bad(format!("edge set '{name}' references edge {e:?}"));
            }
        }
        Ok(())
    }

    /// Nodes of a node set, or the distinct nodes of an edge set of that name.
    pub fn set_nodes(&self, name: &str) -> Option<Vec<usize>> {
        if let Some(s) = self.node_sets.get(name) {
            return Some(s.clone());
        }
        self.edge_sets.get(name).map(|edges| {
            let mut v: Vec<usize> = edges.iter().flatten().copied().collect();
            v.sort_unstable();
            v.dedup();
            v
        })
    }

    /// Adds a node set of all nodes satisfying `pred`.
    pub fn tag_nodes(&mut self, name: &str, pred: impl Fn([f64; 2]) -> bool) {
        let set = (0..self.n_nodes()).filter(|&i| pred(self.nodes[i])).collect();
        self.node_sets.insert(name.to_string(), set);
    }

    /// Adds an edge set of all boundary edges whose endpoints both satisfy `pred`.
    pub fn tag_boundary_edges(&mut self, name: &str, pred: impl Fn([f64; 2]) -> bool) {
        let edges = self
            .boundary_edges()
            .into_iter()
            .filter(|e| pred(self.nodes[e[0]]) && pred(self.nodes[e[1]]))
            .collect();
        self.edge_sets.insert(name.to_string(), edges);
    }

    /// Edges used by exactly one triangle, oriented as in that triangle.
    pub fn boundary_edges(&self) -> Vec<[usize; 2]> {
        let mut count: BTreeMap<(usize, usize), ([usize; 2], usize)> = BTreeMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                let entry = count.entry((a.min(b), a.max(b))).or_insert(([a, b], 0));
                entry.1 += 1;
            }
        }
        count.into_values().filter(|(_, c)| *c == 1).map(|(e, _)| e).collect()
    }

    /// Groups of nodes connected through elements for which `keep(e)` holds.
    pub fn components(&self, keep: impl Fn(usize) -> bool) -> Vec<Vec<usize>> {
        let n = self.n_nodes();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        let mut used = vec![false; n];
        for (e, t) in self.triangles.iter().enumerate() {
            if !keep(e) {
                continue;
            }
            for &i in t {
                used[i] = true;
            }
            let r0 = find(&mut parent, t[0]);
            for &i in &t[1..] {
                let r = find(&mut parent, i);
                parent[r] = r0;
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in (0..n).filter(|&i| used[i]) {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(i);
        }
        groups.into_values().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Mesh {
        Mesh::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], vec![[0, 1, 2], [0, 2, 3]])
    }

    #[test]
    fn gradients_reproduce_linear_field() {
        let g = ElementGeom::new([[0.0, 0.0], [2.0, 0.5], [0.3, 1.7]]);
        let f = |p: [f64; 2]| 3.0 * p[0] - 2.0 * p[1] + 1.0;
        let v = [f(([0.0, 0.0])), f([2.0, 0.5]), f([0.3, 1.7])];
        let grad = g.gradient(v);
        assert!((grad[0] - 3.0).abs() < 1e-14 && (grad[1] + 2.0).abs() < 1e-14);
        assert!((g.area - 0.5 * (2.0 * 1.7 - 0.3 * 0.5)).abs() < 1e-15);
    }

    #[test]
    fn clockwise_element_rejected() {
        let mut m = square();
        m.triangles[0] = [0, 2, 1];
        assert!(matches!(m.validate(), Err(FemError::InvalidMesh(_))));
    }

    #[test]
    fn bad_set_index_rejected() {
        let mut m = square();
        m.node_sets.insert("x".into(), vec![7]);
        assert!(m.validate().is_err());
    }

    #[test]
    fn boundary_edges_of_square() {
        let mut m = square();
        assert_eq!(m.boundary_edges().len(), 4);
        m.tag_boundary_edges("bottom", |p| p[1] == 0.0);
        assert_eq!(m.set_nodes("bottom"), Some(vec![0, 1]));
    }

    #[test]
    fn components_split_on_removed_elements() {
        let m = Mesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [5.0, 0.0], [6.0, 0.0], [5.0, 1.0]],
            vec![[0, 1, 2], [3, 4, 5]],
        );
        assert_eq!(m.components(|_| true).len(), 2);
        assert_eq!(m.components(|e| e == 0), vec![vec![0, 1, 2]]);
    }
}
