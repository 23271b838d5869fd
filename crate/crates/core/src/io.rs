//! Legacy VTK, history CSV and the plain-text mesh format.
//!
//! Mesh text format (ids are 0-based and must appear in order):
//!
//! ```text
//! nodes 4
//! 0 0.0 0.0
//! ...
//! elements 2
//! 0 0 1 2
//! ...
//! nodeset top 2
//! 2 3
//! edgeset bottom 1
//! 0 1
//! ```

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use crate::fem::{History, Mesh, StepReport};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Fixed 17-significant-digit float formatting.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub const HISTORY_HEADER: &str = "step,u_D,reaction_x,reaction_y,max_d,iterations";

/// History row of one step, without the newline. Reactions are those of
/// the first boundary condition.
pub fn history_row(s: &StepReport) -> String {
    let r = s.reactions.first().copied().unwrap_or([0.0; 2]);
    format!("{},{},{},{},{},{}", s.step, fmt_f64(s.load), fmt_f64(r[0]), fmt_f64(r[1]), fmt_f64(s.max_d), s.iterations)
}

/// Header plus one CSV row per step.
pub fn write_history(mut w: impl Write, history: &History) -> io::Result<()> {
    writeln!(w, "{HISTORY_HEADER}")?;
    for s in &history.steps {
        writeln!(w, "{}", history_row(s))?;
    }
    Ok(())
}

/// Legacy ASCII unstructured grid with point data `d` (scalar) and `u` (vector).
pub fn write_vtk(mut w: impl Write, mesh: &Mesh, u: &[f64], d: &[f64], title: &str) -> io::Result<()> {
    let mut s = String::new();
    let n = mesh.n_nodes();
    let m = mesh.n_elements();
    let _ = writeln!(s, "# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {n} double");
    for p in &mesh.nodes {
        let _ = writeln!(s, "{} {} 0", fmt_f64(p[0]), fmt_f64(p[1]));
    }
    let _ = writeln!(s, "CELLS {m} {}", 4 * m);
    for t in &mesh.triangles {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(s, "CELL_TYPES {m}");
    for _ in 0..m {
        s.push_str("5\n");
    }
    let _ = writeln!(s, "POINT_DATA {n}\nSCALARS d double 1\nLOOKUP_TABLE default");
    for x in d {
        let _ = writeln!(s, "{}", fmt_f64(*x));
    }
    let _ = writeln!(s, "VECTORS u double");
    for i in 0..n {
        let _ = writeln!(s, "{} {} 0", fmt_f64(u[2 * i]), fmt_f64(u[2 * i + 1]));
    }
    w.write_all(s.as_bytes())
}

/// Fields read back from a file written by [`write_vtk`].
#[derive(Debug, Clone, PartialEq)]
pub struct VtkSnapshot {
    pub mesh: Mesh,
    pub d: Vec<f64>,
    pub u: Vec<f64>,
}

struct Tokens<R> {
    lines: std::iter::Enumerate<io::Lines<R>>,
    buf: Vec<String>,
    line: usize,
}

impl<R: BufRead> Tokens<R> {
    fn new(r: R) -> Self {
        Self { lines: r.lines().enumerate(), buf: Vec::new(), line: 0 }
    }

    fn err(&self, msg: impl Into<String>) -> IoError {
        IoError::Parse { line: self.line, msg: msg.into() }
    }

    fn next(&mut self) -> Result<Option<String>, IoError> {
        while self.buf.is_empty() {
            let Some((i, l)) = self.lines.next() else { return Ok(None) };
            self.line = i + 1;
            let l = l?;
            let l = l.split('#').next().unwrap_or("");
            self.buf = l.split_whitespace().rev().map(String::from).collect();
        }
        Ok(self.buf.pop())
    }

    fn expect(&mut self) -> Result<String, IoError> {
        self.next()?.ok_or_else(|| self.err("unexpected end of input"))
    }

    fn parse<T: std::str::FromStr>(&mut self) -> Result<T, IoError> {
        let t = self.expect()?;
        t.parse().map_err(|_| self.err(format!("cannot parse '{t}'")))
    }

    fn skip_line(&mut self) {
        self.buf.clear();
    }
}

pub fn read_vtk(r: impl BufRead) -> Result<VtkSnapshot, IoError> {
    let mut lines = r.lines();
    for _ in 0..2 {
        lines.next().transpose()?;
    }
    let rest: Vec<String> = lines.collect::<Result<_, _>>()?;
    let mut t = Tokens::new(io::Cursor::new(rest.join("\n")));
    let mut mesh = Mesh::default();
    let (mut d, mut u) = (Vec::new(), Vec::new());
    while let Some(word) = t.next()? {
        match word.as_str() {
            "POINTS" => {
                let n: usize = t.parse()?;
                t.expect()?;
                for _ in 0..n {
                    let (x, y, _z): (f64, f64, f64) = (t.parse()?, t.parse()?, t.parse()?);
                    mesh.nodes.push([x, y]);
                }
            }
            "CELLS" => {
                let m: usize = t.parse()?;
                t.expect()?;
                for _ in 0..m {
                    let k: usize = t.parse()?;
                    if k != 3 {
                        return Err(t.err("only triangles are supported"));
                    }
                    mesh.triangles.push([t.parse()?, t.parse()?, t.parse()?]);
                }
            }
            "SCALARS" => {
                let name = t.expect()?;
                t.skip_line();
                t.expect()?; // LOOKUP_TABLE
                t.expect()?;
                let vals: Vec<f64> = (0..mesh.n_nodes()).map(|_| t.parse()).collect::<Result<_, _>>()?;
                if name == "d" {
                    d = vals;
                }
            }
            "VECTORS" => {
                let name = t.expect()?;
                t.expect()?;
                let mut vals = Vec::with_capacity(2 * mesh.n_nodes());
                for _ in 0..mesh.n_nodes() {
                    let (x, y, _z): (f64, f64, f64) = (t.parse()?, t.parse()?, t.parse()?);
                    vals.extend([x, y]);
                }
                if name == "u" {
                    u = vals;
                }
            }
            _ => {}
        }
    }
    if d.len() != mesh.n_nodes() {
        return Err(t.err("missing point scalar 'd'"));
    }
    if u.is_empty() {
        u = vec![0.0; 2 * mesh.n_nodes()];
    }
    Ok(VtkSnapshot { mesh, d, u })
}

pub fn write_mesh(mut w: impl Write, mesh: &Mesh) -> io::Result<()> {
    let mut s = String::new();
    let _ = writeln!(s, "nodes {}", mesh.n_nodes());
    for (i, p) in mesh.nodes.iter().enumerate() {
        let _ = writeln!(s, "{i} {} {}", fmt_f64(p[0]), fmt_f64(p[1]));
    }
    let _ = writeln!(s, "elements {}", mesh.n_elements());
    for (i, t) in mesh.triangles.iter().enumerate() {
        let _ = writeln!(s, "{i} {} {} {}", t[0], t[1], t[2]);
    }
    for (name, set) in &mesh.node_sets {
        let _ = writeln!(s, "nodeset {name} {}", set.len());
        let items: Vec<String> = set.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(s, "{}", items.join(" "));
    }
    for (name, set) in &mesh.edge_sets {
        let _ = writeln!(s, "edgeset {name} {}", set.len());
        for e in set {
            let _ = writeln!(s, "{} {}", e[0], e[1]);
        }
    }
    w.write_all(s.as_bytes())
}

pub fn read_mesh(r: impl BufRead) -> Result<Mesh, IoError> {
    let mut t = Tokens::new(r);
    let mut mesh = Mesh::default();
    let check_id = |t: &Tokens<_>, got: usize, want: usize| {
        if got == want {
            Ok(())
        } else {
            Err(t.err(format!("expected id {want}, found {got}")))
        }
    };
    while let Some(word) = t.next()? {
        match word.as_str() {
            "nodes" => {
                let n: usize = t.parse()?;
                for i in 0..n {
                    let id: usize = t.parse()?;
                    check_id(&t, id, i)?;
                    mesh.nodes.push([t.parse()?, t.parse()?]);
                }
            }
            "elements" => {
                let m: usize = t.parse()?;
                for i in 0..m {
                    let id: usize = t.parse()?;
                    check_id(&t, id, i)?;
                    mesh.triangles.push([t.parse()?, t.parse()?, t.parse()?]);
                }
            }
            "nodeset" => {
                let name = t.expect()?;
                let k: usize = t.parse()?;
                let set = (0..k).map(|_| t.parse()).collect::<Result<_, _>>()?;
                mesh.node_sets.insert(name, set);
            }
            "edgeset" => {
                let name = t.expect()?;
                let k: usize = t.parse()?;
                let set = (0..k).map(|_| Ok([t.parse()?, t.parse()?])).collect::<Result<_, IoError>>()?;
                mesh.edge_sets.insert(name, set);
            }
            other => return Err(t.err(format!("unknown section '{other}'"))),
        }
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mesh() -> Mesh {
        let mut m = Mesh::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], vec![[0, 1, 2], [0, 2, 3]]);
        m.tag_nodes("top", |p| p[1] == 1.0);
        m.tag_boundary_edges("bottom", |p| p[1] == 0.0);
        m
    }

    #[test]
    fn float_format_has_17_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn mesh_round_trip() {
        let m = mesh();
        let mut buf = Vec::new();
        write_mesh(&mut buf, &m).unwrap();
        let back = read_mesh(io::Cursor::new(buf)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn mesh_parse_error_has_line() {
        let text = "nodes 2\n0 0 0\n1 1 x\n";
        match read_mesh(io::Cursor::new(text)) {
            Err(IoError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn vtk_round_trip() {
        let m = mesh();
        let u = vec![0.1, -0.2, 0.3, 0.0, 1e-9, 2.0, -1.0, 0.5];
        let d = vec![0.0, 0.25, 1.0, 0.125];
        let mut buf = Vec::new();
        write_vtk(&mut buf, &m, &u, &d, "t").unwrap();
        let snap = read_vtk(io::Cursor::new(buf)).unwrap();
        assert_eq!(snap.mesh.nodes, m.nodes);
        assert_eq!(snap.mesh.triangles, m.triangles);
        assert_eq!(snap.d, d);
        assert_eq!(snap.u, u);
    }
}
