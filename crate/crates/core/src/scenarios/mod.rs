//! Benchmark setups, scenario files and constitutive sweeps.
//!
//! A [`ScenarioSpec`] is plain data: geometry, mesh grading, initial crack,
//! boundary loads, load program and material (in GPa, as tabulated). The
//! built-in specs are produced by [`build`]; files use the same schema in TOML.

mod grid;
mod sweep;

use std::path::Path;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

pub use grid::{cut_slit, structured, AxisSpec, Rect, Slit, Zone};
pub use sweep::{constitutive_sweep, sweep_ratio, SweepKind, SweepSetup, SweepTable};

use crate::constitutive::{MaterialParams, ModelKind, DEFAULT_ALPHA_REG, DEFAULT_K_RESIDUAL, DEFAULT_SK_B};
use crate::fem::{Controls, DisplacementBc, ComponentLoad, FemError, LoadProgram, LoadSegment, Mesh, PhaseDirichlet, Problem};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("{0}")]
    Parse(String),
    #[error("invalid scenario: {field}: {msg}")]
    Invalid { field: String, msg: String },
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn invalid(field: &str, msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid { field: field.into(), msg: msg.into() }
}

/// The paper's benchmark experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuiltinScenario {
    UniaxialTension,
    UniaxialCompression,
    ThreePointBending,
    Shear,
    ThroughCrackShear,
    CircularLoadPath,
    ConstitutiveSweep2d,
    ConstitutiveSweep3d,
}

impl BuiltinScenario {
    pub const ALL: [BuiltinScenario; 8] = [
        BuiltinScenario::UniaxialTension,
        BuiltinScenario::UniaxialCompression,
        BuiltinScenario::ThreePointBending,
        BuiltinScenario::Shear,
        BuiltinScenario::ThroughCrackShear,
        BuiltinScenario::CircularLoadPath,
        BuiltinScenario::ConstitutiveSweep2d,
        BuiltinScenario::ConstitutiveSweep3d,
    ];

    /// Short selector used on the command line.
    pub fn name(self) -> &'static str {
        match self {
            BuiltinScenario::UniaxialTension => "tension",
            BuiltinScenario::UniaxialCompression => "compression",
            BuiltinScenario::ThreePointBending => "bending",
            BuiltinScenario::Shear => "shear",
            BuiltinScenario::ThroughCrackShear => "through-crack-shear",
            BuiltinScenario::CircularLoadPath => "circular",
            BuiltinScenario::ConstitutiveSweep2d => "sweep-2d",
            BuiltinScenario::ConstitutiveSweep3d => "sweep-3d",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.name() == s)
    }

    pub fn description(self) -> &'static str {
        match self {
            BuiltinScenario::UniaxialTension => "square plate, edge crack to the center, pulled apart",
            BuiltinScenario::UniaxialCompression => "same plate and crack, pushed together",
            BuiltinScenario::ThreePointBending => "notched beam on two supports, loaded at mid-span",
            BuiltinScenario::Shear => "square plate with a traction-free slit, sheared",
            BuiltinScenario::ThroughCrackShear => "square plate cut through by a d = 1 band, sheared",
            BuiltinScenario::CircularLoadPath => "through-cracked plate, top edge driven around a circle",
            BuiltinScenario::ConstitutiveSweep2d => "pointwise sigma12/(2 mu eps12) against d, in-plane shear",
            BuiltinScenario::ConstitutiveSweep3d => "as sweep-2d with eps33 = -1e-6",
        }
    }
}

/// Mesh density: crack-zone spacing divided by 1, 2 or 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Density {
    #[default]
    Coarse,
    Medium,
    Fine,
}

impl Density {
    pub fn factor(self) -> f64 {
        match self {
            Density::Coarse => 1.0,
            Density::Medium => 2.0,
            Density::Fine => 4.0,
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "coarse" => Some(Density::Coarse),
            "medium" => Some(Density::Medium),
            "fine" => Some(Density::Fine),
            _ => None,
        }
    }
}

/// Material as tabulated: moduli in GPa, gc in mJ/mm², ℓ in mm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSpec {
    pub lambda_gpa: f64,
    pub mu_gpa: f64,
    pub gc: f64,
    pub ell: f64,
    #[serde(default = "default_k")]
    pub k_residual: f64,
    #[serde(default = "default_alpha")]
    pub alpha_reg: f64,
    #[serde(default = "default_sk_b")]
    pub sk_b: f64,
}

fn default_k() -> f64 {
    DEFAULT_K_RESIDUAL
}
fn default_alpha() -> f64 {
    DEFAULT_ALPHA_REG
}
fn default_sk_b() -> f64 {
    DEFAULT_SK_B
}

impl MaterialSpec {
    /// Internal units: MPa and mm.
    pub fn params(&self) -> MaterialParams {
        MaterialParams {
            lambda: self.lambda_gpa * 1000.0,
            mu: self.mu_gpa * 1000.0,
            gc: self.gc,
            ell: self.ell,
            k_residual: self.k_residual,
            alpha_reg: self.alpha_reg,
            sk_b: self.sk_b,
        }
    }
}

/// One row of the bundled material table.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialRow {
    pub scenario: String,
    /// Raw cell text, in column order lambda, mu, gc, ell.
    pub cells: [String; 4],
}

static MATERIALS: LazyLock<Vec<MaterialRow>> = LazyLock::new(|| {
    include_str!("../../data/materials.csv")
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').map(str::trim).collect();
            MaterialRow { scenario: f[0].to_string(), cells: [1, 2, 3, 4].map(|i| f[i].to_string()) }
        })
        .collect()
});

/// Bundled material rows.
pub fn material_table() -> &'static [MaterialRow] {
    &MATERIALS
}

fn material(scenario: &str) -> MaterialSpec {
    let row = MATERIALS.iter().find(|r| r.scenario == scenario).expect("bundled material row");
    let v = row.cells.clone().map(|c| c.parse::<f64>().expect("bundled material value"));
    MaterialSpec {
        lambda_gpa: v[0],
        mu_gpa: v[1],
        gc: v[2],
        ell: v[3],
        k_residual: DEFAULT_K_RESIDUAL,
        alpha_reg: DEFAULT_ALPHA_REG,
        sk_b: DEFAULT_SK_B,
    }
}

/// Regularization constant used by the FEM benchmarks. See the README.
pub const BENCHMARK_ALPHA_REG: f64 = 566.0;

/// Initial crack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CrackSpec {
    /// d = 1 on a one-element band along the horizontal segment y = `y`, x ∈ [x_from, x_to].
    Band { x_from: f64, x_to: f64, y: f64, width: f64 },
    /// Geometric cut; `to` is the tip.
    Slit { from: [f64; 2], to: [f64; 2] },
}

/// Which nodes a boundary condition acts on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Region {
    /// Nodes on a domain side, optionally restricted to [from, to] along it.
    Edge {
        side: Side,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        from: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        to: Option<f64>,
    },
    /// The node nearest to `at`.
    Point { at: [f64; 2] },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Top,
    Bottom,
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySpec {
    pub name: String,
    pub region: Region,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<ComponentLoad>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<ComponentLoad>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSpec {
    pub x: AxisSpec,
    pub y: AxisSpec,
}

/// A finite-element benchmark. The first boundary is the loaded one whose
/// reaction goes into the history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FemSetup {
    pub domain: Rect,
    pub mesh: MeshSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crack: Option<CrackSpec>,
    pub boundaries: Vec<BoundarySpec>,
    pub load: LoadProgram,
    #[serde(default)]
    pub controls: Controls,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Setup {
    Fem(FemSetup),
    Sweep(SweepSetup),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    pub material: MaterialSpec,
    #[serde(default)]
    pub density: Density,
    pub setup: Setup,
}

fn edge(side: Side) -> Region {
    Region::Edge { side, from: None, to: None }
}

fn bc(name: &str, region: Region, x: Option<ComponentLoad>, y: Option<ComponentLoad>) -> BoundarySpec {
    BoundarySpec { name: name.into(), region, x, y }
}

const FIXED: Option<ComponentLoad> = Some(ComponentLoad::Fixed);

fn linear(scale: f64) -> Option<ComponentLoad> {
    Some(ComponentLoad::Linear { scale })
}

fn segs(start: f64, parts: &[(f64, f64)]) -> LoadProgram {
    LoadProgram {
        start,
        include_start: false,
        segments: parts.iter().map(|&(to, step)| LoadSegment { to, step }).collect(),
    }
}

/// Plate [0,1000]², band crack from the left edge to the center.
fn plate_setup(sign: f64, load: LoadProgram, controls: Controls) -> FemSetup {
    let ell = 40.0;
    let h = ell / 3.0;
    let band = CrackSpec::Band { x_from: 0.0, x_to: 500.0, y: 500.0, width: h };
    FemSetup {
        domain: Rect { x0: 0.0, y0: 0.0, x1: 1000.0, y1: 1000.0 },
        mesh: MeshSpec {
            x: AxisSpec { size: 50.0, zones: vec![Zone { from: 440.0, to: 1000.0, size: h }], lines: vec![500.0], grading: 0.25 },
            y: AxisSpec { size: 100.0, zones: vec![Zone { from: 440.0, to: 560.0, size: h }], lines: vec![], grading: 0.25 },
        },
        crack: Some(band),
        boundaries: vec![
            bc("top", edge(Side::Top), FIXED, linear(sign)),
            bc("bottom", edge(Side::Bottom), FIXED, linear(-sign)),
        ],
        load,
        controls,
    }
}

/// Square [0,100]² with a d = 1 band along y = 50 across the whole width.
fn through_setup(boundaries: Vec<BoundarySpec>, load: LoadProgram) -> FemSetup {
    let h = 3.125 / 2.0;
    FemSetup {
        domain: Rect { x0: 0.0, y0: 0.0, x1: 100.0, y1: 100.0 },
        mesh: MeshSpec {
            x: AxisSpec::uniform(100.0 / 30.0),
            y: AxisSpec { size: 8.0, zones: vec![Zone { from: 40.0, to: 60.0, size: h }], lines: vec![], grading: 0.25 },
        },
        crack: Some(CrackSpec::Band { x_from: 0.0, x_to: 100.0, y: 50.0, width: h }),
        boundaries,
        load,
        controls: Controls::default(),
    }
}

/// Builds the spec of a built-in scenario at the given density.
pub fn build(which: BuiltinScenario, density: Density) -> ScenarioSpec {
    let name = which.name().to_string();
    let bench = |row: &str| MaterialSpec { alpha_reg: BENCHMARK_ALPHA_REG, ..material(row) };
    let (material, setup) = match which {
        BuiltinScenario::UniaxialTension => {
            let controls = Controls { stop_fraction: Some(0.01), ..Controls::default() };
            (bench("tension-compression"), Setup::Fem(plate_setup(1.0, segs(0.0, &[(0.07, 0.01), (0.1, 0.0005)]), controls)))
        }
        BuiltinScenario::UniaxialCompression => {
            (bench("tension-compression"), Setup::Fem(plate_setup(-1.0, segs(0.0, &[(0.1, 0.01)]), Controls::default())))
        }
        BuiltinScenario::ThreePointBending => {
            let ell = 0.06;
            let h = ell / 1.5;
            let setup = FemSetup {
                domain: Rect { x0: 0.0, y0: 0.0, x1: 8.0, y1: 2.0 },
                mesh: MeshSpec {
                    x: AxisSpec {
                        size: 0.4,
                        zones: vec![Zone { from: 3.7, to: 4.3, size: h }],
                        lines: vec![3.7, 4.0, 4.3],
                        grading: 0.25,
                    },
                    y: AxisSpec { size: h, zones: vec![], lines: vec![0.4], grading: 0.25 },
                },
                crack: Some(CrackSpec::Slit { from: [4.0, 0.0], to: [4.0, 0.4] }),
                boundaries: vec![
                    bc("load", Region::Edge { side: Side::Top, from: Some(3.7), to: Some(4.3) }, None, linear(-1.0)),
                    bc("support-left", Region::Point { at: [0.0, 0.0] }, FIXED, FIXED),
                    bc("support-right", Region::Point { at: [8.0, 0.0] }, None, FIXED),
                ],
                load: segs(0.0, &[(0.04, 0.01), (0.05, 0.002), (0.12, 0.01)]),
                controls: Controls::default(),
            };
            (bench("bending"), Setup::Fem(setup))
        }
        BuiltinScenario::Shear => {
            let ell = 3.125;
            let h = ell / 4.0;
            let setup = FemSetup {
                domain: Rect { x0: 0.0, y0: 0.0, x1: 100.0, y1: 100.0 },
                mesh: MeshSpec {
                    x: AxisSpec { size: 8.0, zones: vec![Zone { from: 46.0, to: 64.0, size: h }], lines: vec![50.0], grading: 0.25 },
                    y: AxisSpec { size: 8.0, zones: vec![Zone { from: 34.0, to: 54.0, size: h }], lines: vec![50.0], grading: 0.25 },
                },
                crack: Some(CrackSpec::Slit { from: [0.0, 50.0], to: [50.0, 50.0] }),
                boundaries: vec![
                    bc("top", edge(Side::Top), linear(1.0), FIXED),
                    bc("bottom", edge(Side::Bottom), linear(-1.0), FIXED),
                ],
                load: segs(0.0, &[(0.05, 0.01), (0.06, 0.001), (0.1, 0.01)]),
                controls: Controls::default(),
            };
            (bench("shear"), Setup::Fem(setup))
        }
        BuiltinScenario::ThroughCrackShear => {
            let setup = through_setup(
                vec![bc("top", edge(Side::Top), linear(1.0), FIXED), bc("bottom", edge(Side::Bottom), linear(-1.0), FIXED)],
                segs(0.0, &[(0.01, 0.01)]),
            );
            (bench("through-crack"), Setup::Fem(setup))
        }
        BuiltinScenario::CircularLoadPath => {
            let du = 0.01;
            let mut setup = through_setup(
                vec![
                    bc("top", edge(Side::Top), Some(ComponentLoad::Sin { amp: du }), Some(ComponentLoad::OnePlusCos { amp: du })),
                    bc("bottom", edge(Side::Bottom), FIXED, FIXED),
                ],
                segs(0.0, &[(std::f64::consts::PI, std::f64::consts::FRAC_PI_4)]),
            );
            setup.load.include_start = true;
            (bench("through-crack"), Setup::Fem(setup))
        }
        BuiltinScenario::ConstitutiveSweep2d | BuiltinScenario::ConstitutiveSweep3d => {
            let kind = if which == BuiltinScenario::ConstitutiveSweep2d { SweepKind::TwoD } else { SweepKind::ThreeD };
            let mat = MaterialSpec { k_residual: 0.0, ..material("sweep") };
            (mat, Setup::Sweep(SweepSetup::paper(kind)))
        }
    };
    ScenarioSpec { name, material, density, setup }
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let m = &self.material;
        let checks = [("material.lambda_gpa", m.lambda_gpa), ("material.mu_gpa", m.mu_gpa), ("material.gc", m.gc), ("material.ell", m.ell)];
        for (field, v) in checks {
            if !v.is_finite() {
                return Err(invalid(field, "must be finite"));
            }
        }
        if m.mu_gpa <= 0.0 {
            return Err(invalid("material.mu_gpa", format!("must be positive, got {}", m.mu_gpa)));
        }
        if m.gc <= 0.0 {
            return Err(invalid("material.gc", format!("must be positive, got {}", m.gc)));
        }
        if m.ell <= 0.0 {
            return Err(invalid("material.ell", format!("must be positive, got {}", m.ell)));
        }
        m.params().validate().map_err(|e| invalid("material", e.to_string()))?;
        match &self.setup {
            Setup::Fem(f) => f.validate(),
            Setup::Sweep(s) => s.validate(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, ScenarioError> {
        let spec: ScenarioSpec = toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario specs serialize")
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| match e {
            ScenarioError::Parse(msg) => ScenarioError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn fem(&self) -> Option<&FemSetup> {
        match &self.setup {
            Setup::Fem(f) => Some(f),
            Setup::Sweep(_) => None,
        }
    }

    /// Mesh and FEM problem for `model`.
    pub fn problem(&self, model: ModelKind) -> Result<Problem, ScenarioError> {
        let f = self.fem().ok_or_else(|| invalid("setup", "not a finite-element scenario"))?;
        let mesh = f.mesh(self.density)?;
        let bcs = f.boundaries.iter().map(|b| DisplacementBc { set: b.name.clone(), x: b.x, y: b.y }).collect();
        let crack = match f.crack {
            Some(CrackSpec::Band { .. }) => Some(PhaseDirichlet { set: "crack".into(), normal: Some([0.0, 1.0, 0.0]) }),
            _ => None,
        };
        Ok(Problem::new(mesh, model, self.material.params(), bcs, crack)?)
    }
}

impl FemSetup {
    fn tol(&self) -> f64 {
        1e-9 * self.domain.width().max(self.domain.height())
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let d = &self.domain;
        if !(d.x1 > d.x0 && d.y1 > d.y0) {
            return Err(invalid("domain", "empty rectangle"));
        }
        for (field, ax) in [("mesh.x", &self.mesh.x), ("mesh.y", &self.mesh.y)] {
            let sizes = std::iter::once(ax.size).chain(ax.zones.iter().map(|z| z.size));
            if sizes.into_iter().any(|s| !(s > 0.0) || !s.is_finite()) || !(ax.grading >= 0.0) {
                return Err(invalid(field, "sizes must be positive and grading nonnegative"));
            }
            if ax.zones.iter().any(|z| !(z.to > z.from)) {
                return Err(invalid(field, "zone with to <= from"));
            }
        }
        let tol = self.tol();
        match &self.crack {
            Some(CrackSpec::Band { x_from, x_to, y, width }) => {
                if !(x_to > x_from) || !(*width > 0.0) {
                    return Err(invalid("crack", "band needs x_to > x_from and positive width"));
                }
                for p in [[*x_from, *y - width / 2.0], [*x_to, *y + width / 2.0]] {
                    if !d.contains(p, tol) {
                        return Err(invalid("crack", format!("band point {p:?} lies outside the domain")));
                    }
                }
            }
            Some(CrackSpec::Slit { from, to }) => {
                let s = Slit { from: *from, to: *to };
                if !(s.is_horizontal() ^ s.is_vertical()) {
                    return Err(invalid("crack", "slit must be horizontal or vertical with nonzero length"));
                }
                for p in [from, to] {
                    if !d.contains(*p, tol) {
                        return Err(invalid("crack", format!("slit point {p:?} lies outside the domain")));
                    }
                }
            }
            None => {}
        }
        if self.boundaries.is_empty() {
            return Err(invalid("boundaries", "at least one boundary condition is required"));
        }
        for b in &self.boundaries {
            if b.name == "crack" {
                return Err(invalid("boundaries", "the name 'crack' is reserved"));
            }
            if let Region::Point { at } = b.region {
                if !d.contains(at, tol) {
                    return Err(invalid(&format!("boundaries.{}", b.name), "point outside the domain"));
                }
            }
        }
        self.load.validate().map_err(|e| invalid("load", e.to_string()))?;
        self.controls.validate().map_err(|e| invalid("controls", e.to_string()))?;
        Ok(())
    }

    /// Generates the tagged mesh.
    pub fn mesh(&self, density: Density) -> Result<Mesh, ScenarioError> {
        self.validate()?;
        let d = self.domain;
        let mut xa = self.mesh.x.refined(density.factor());
        let mut ya = self.mesh.y.refined(density.factor());
        let mut band_width = None;
        match &self.crack {
            Some(CrackSpec::Band { x_from, x_to, y, width }) => {
                let w = width / density.factor();
                band_width = Some(w);
                ya.lines.extend([y - w / 2.0, y + w / 2.0]);
                xa.lines.extend([*x_from, *x_to]);
            }
            Some(CrackSpec::Slit { from, to }) => {
                xa.lines.extend([from[0], to[0]]);
                ya.lines.extend([from[1], to[1]]);
            }
            None => {}
        }
        for b in &self.boundaries {
            match b.region {
                Region::Edge { side: Side::Top | Side::Bottom, from, to } => xa.lines.extend(from.into_iter().chain(to)),
                Region::Edge { side: Side::Left | Side::Right, from, to } => ya.lines.extend(from.into_iter().chain(to)),
                Region::Point { .. } => {}
            }
        }
        let xs = xa.coordinates(d.x0, d.x1);
        let ys = ya.coordinates(d.y0, d.y1);
        let mut mesh = structured(&xs, &ys);
        let tol = self.tol();
        if let Some(CrackSpec::Slit { from, to }) = &self.crack {
            cut_slit(&mut mesh, &Slit { from: *from, to: *to }, tol);
        }
        if let (Some(CrackSpec::Band { x_from, x_to, y, .. }), Some(w)) = (&self.crack, band_width) {
            let (x_from, x_to, y) = (*x_from, *x_to, *y);
            mesh.tag_nodes("crack", |p| p[0] >= x_from - tol && p[0] <= x_to + tol && (p[1] - y).abs() <= w / 2.0 + tol);
        }
        for (side, name) in [(Side::Top, "top"), (Side::Bottom, "bottom"), (Side::Left, "left"), (Side::Right, "right")] {
            let on = side_predicate(&d, side, tol);
            mesh.tag_boundary_edges(&format!("edge-{name}"), on);
        }
        for b in &self.boundaries {
            match b.region {
                Region::Edge { side, from, to } => {
                    let on = side_predicate(&d, side, tol);
                    let axis = if matches!(side, Side::Top | Side::Bottom) { 0 } else { 1 };
                    let lo = from.unwrap_or(f64::NEG_INFINITY);
                    let hi = to.unwrap_or(f64::INFINITY);
                    mesh.tag_nodes(&b.name, |p| on(p) && p[axis] >= lo - tol && p[axis] <= hi + tol);
                }
                Region::Point { at } => {
                    let nearest = (0..mesh.n_nodes())
                        .min_by(|&i, &j| dist2(mesh.nodes[i], at).total_cmp(&dist2(mesh.nodes[j], at)))
                        .unwrap_or(0);
                    mesh.node_sets.insert(b.name.clone(), vec![nearest]);
                }
            }
            if mesh.node_sets[&b.name].is_empty() {
                return Err(invalid(&format!("boundaries.{}", b.name), "selects no nodes"));
            }
        }
        mesh.validate()?;
        Ok(mesh)
    }
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

fn side_predicate(d: &Rect, side: Side, tol: f64) -> impl Fn([f64; 2]) -> bool {
    let d = *d;
    move |p: [f64; 2]| match side {
        Side::Top => (p[1] - d.y1).abs() <= tol,
        Side::Bottom => (p[1] - d.y0).abs() <= tol,
        Side::Left => (p[0] - d.x0).abs() <= tol,
        Side::Right => (p[0] - d.x1).abs() <= tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for b in BuiltinScenario::ALL {
            assert_eq!(BuiltinScenario::from_name(b.name()), Some(b));
        }
    }

    #[test]
    fn density_factors() {
        assert_eq!(Density::Fine.factor(), 4.0);
        assert_eq!(Density::from_name("medium"), Some(Density::Medium));
        assert_eq!(Density::from_name("x"), None);
    }

    #[test]
    fn gpa_converted_to_mpa() {
        let p = material("tension-compression").params();
        assert_eq!(p.lambda, 121150.0);
        assert_eq!(p.mu, 80770.0);
    }
}
