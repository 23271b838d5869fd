//! Shear-fit coefficients a(ν), b(ν) and the crack-ratio calibration table.
//!
//! Both tables ship as CSV under `data/` and are parsed once on first use.

use std::path::Path;
use std::sync::LazyLock;

use super::ConstitutiveError;

const SHEAR_FIT_CSV: &str = include_str!("../../data/shear_fit.csv");
const CALIBRATION_CSV: &str = include_str!("../../data/calibration.csv");

/// Distance in ν within which a lookup returns a tabulated row verbatim.
pub const NU_SNAP: f64 = 1e-4;

static SHEAR_FIT: LazyLock<ShearFitTable> =
    LazyLock::new(|| ShearFitTable::parse(SHEAR_FIT_CSV).expect("bundled shear fit table"));
static CALIBRATION: LazyLock<CalibrationTable> =
    LazyLock::new(|| CalibrationTable::parse(CALIBRATION_CSV).expect("bundled calibration table"));

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearFitRow {
    pub nu: f64,
    pub a: f64,
    pub b: f64,
    pub correlation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShearFitTable {
    pub rows: Vec<ShearFitRow>,
}

fn parse_rows(text: &str, columns: usize, what: &str) -> Result<Vec<Vec<f64>>, ConstitutiveError> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate().skip(1) {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let vals: Result<Vec<f64>, _> = line.split(',').map(|s| s.trim().parse::<f64>()).collect();
        match vals {
            Ok(v) if v.len() == columns => out.push(v),
            _ => {
                return Err(ConstitutiveError::InvalidInput(format!(
                    "{what}: line {}: expected {columns} numeric columns",
                    lineno + 1
                )))
            }
        }
    }
    for w in out.windows(2) {
        if w[1][0] <= w[0][0] {
            return Err(ConstitutiveError::InvalidInput(format!("{what}: first column not increasing")));
        }
    }
    if out.len() < 2 {
        return Err(ConstitutiveError::InvalidInput(format!("{what}: needs at least two rows")));
    }
    Ok(out)
}

fn interval(xs: impl Iterator<Item = f64> + Clone, x: f64) -> (usize, f64) {
    let xs: Vec<f64> = xs.collect();
    let i = xs.windows(2).position(|w| x <= w[1]).unwrap_or(xs.len() - 2);
    let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    (i, t)
}

impl ShearFitTable {
    pub fn builtin() -> &'static ShearFitTable {
        &SHEAR_FIT
    }

    pub fn parse(text: &str) -> Result<Self, ConstitutiveError> {
        let rows = parse_rows(text, 4, "shear fit table")?
            .into_iter()
            .map(|v| ShearFitRow { nu: v[0], a: v[1], b: v[2], correlation: v[3] })
            .collect();
        Ok(Self { rows })
    }

    pub fn load(path: &Path) -> Result<Self, ConstitutiveError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConstitutiveError::InvalidInput(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn nu_range(&self) -> (f64, f64) {
        (self.rows[0].nu, self.rows[self.rows.len() - 1].nu)
    }

    /// (a, b) at ν: a tabulated row when within [`NU_SNAP`], else linear interpolation.
    pub fn coefficients(&self, nu: f64) -> Result<(f64, f64), ConstitutiveError> {
        if let Some(r) = self.rows.iter().find(|r| (r.nu - nu).abs() < NU_SNAP) {
            return Ok((r.a, r.b));
        }
        let (lo, hi) = self.nu_range();
        if !(lo..=hi).contains(&nu) {
            return Err(ConstitutiveError::OutOfRange { what: "Poisson ratio", value: nu, lo, hi });
        }
        let (i, t) = interval(self.rows.iter().map(|r| r.nu), nu);
        let (r0, r1) = (&self.rows[i], &self.rows[i + 1]);
        Ok((r0.a + t * (r1.a - r0.a), r0.b + t * (r1.b - r0.b)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrackShape {
    PlaneStrain,
    Penny,
    Square,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationRow {
    pub ra: f64,
    pub plane_strain: f64,
    pub penny: f64,
    pub square: f64,
}

impl CalibrationRow {
    pub fn get(&self, shape: CrackShape) -> f64 {
        match shape {
            CrackShape::PlaneStrain => self.plane_strain,
            CrackShape::Penny => self.penny,
            CrackShape::Square => self.square,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationTable {
    pub rows: Vec<CalibrationRow>,
}

impl CalibrationTable {
    pub fn builtin() -> &'static CalibrationTable {
        &CALIBRATION
    }

    pub fn parse(text: &str) -> Result<Self, ConstitutiveError> {
        let rows = parse_rows(text, 4, "calibration table")?
            .into_iter()
            .map(|v| CalibrationRow { ra: v[0], plane_strain: v[1], penny: v[2], square: v[3] })
            .collect();
        Ok(Self { rows })
    }

    pub fn load(path: &Path) -> Result<Self, ConstitutiveError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConstitutiveError::InvalidInput(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Phase-field value equivalent to crack-length ratio r_a.
    pub fn phase_for(&self, ra: f64, shape: CrackShape) -> Result<f64, ConstitutiveError> {
        let (lo, hi) = (self.rows[0].ra, self.rows[self.rows.len() - 1].ra);
        if !(lo..=hi).contains(&ra) {
            return Err(ConstitutiveError::OutOfRange { what: "crack length ratio", value: ra, lo, hi });
        }
        if let Some(r) = self.rows.iter().find(|r| r.ra == ra) {
            return Ok(r.get(shape));
        }
        let (i, t) = interval(self.rows.iter().map(|r| r.ra), ra);
        let (y0, y1) = (self.rows[i].get(shape), self.rows[i + 1].get(shape));
        Ok(y0 + t * (y1 - y0))
    }
}

/// Table lookup d(r_a) for the given crack shape using the bundled table.
pub fn calibrate_phase(ra: f64, shape: CrackShape, table: &CalibrationTable) -> Result<f64, ConstitutiveError> {
    table.phase_for(ra, shape)
}
