//! Symmetric second-order tensors in 3D with a Voigt view.
//!
//! Component order everywhere is (11, 22, 33, 23, 13, 12). Stress Voigt
//! vectors hold tensor components. Strain Voigt vectors hold engineering
//! shears (2ε₂₃, 2ε₁₃, 2ε₁₂), so that σ·ε_eng is the work density and a
//! tangent is the plain Jacobian ∂σ/∂ε_eng.

mod eigen;
mod spectral;

pub use eigen::{eig_decompose, EigenSystem};
pub(crate) use eigen::eig_unchecked;
pub use spectral::{coaxial_tangent, PrincipalResponse};

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{SMatrix, SVector};
use thiserror::Error;

/// 6-vector in Voigt order (11, 22, 33, 23, 13, 12).
pub type Voigt6 = SVector<f64, 6>;

/// 6×6 tangent in Voigt order, mapping engineering strain to stress.
pub type Tangent6 = SMatrix<f64, 6, 6>;

/// Plain 3-vector.
pub type Vec3 = [f64; 3];

/// Voigt index of the tensor component (i, j).
pub const VOIGT_INDEX: [[usize; 3]; 3] = [[0, 5, 4], [5, 1, 3], [4, 3, 2]];

/// Tensor index pair of each Voigt slot.
pub const VOIGT_PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TensorError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Symmetric 3×3 tensor stored as six components (11, 22, 33, 23, 13, 12).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymTensor3 {
    pub c: [f64; 6],
}

impl SymTensor3 {
    pub const ZERO: SymTensor3 = SymTensor3 { c: [0.0; 6] };
    pub const IDENTITY: SymTensor3 = SymTensor3 { c: [1.0, 1.0, 1.0, 0.0, 0.0, 0.0] };

    /// Builds from components in the order (11, 22, 33, 23, 13, 12).
    pub fn new(t11: f64, t22: f64, t33: f64, t23: f64, t13: f64, t12: f64) -> Self {
        Self { c: [t11, t22, t33, t23, t13, t12] }
    }

    /// Plane tensor with t13 = t23 = t33 = 0.
    pub fn plane(t11: f64, t22: f64, t12: f64) -> Self {
        Self::new(t11, t22, 0.0, 0.0, 0.0, t12)
    }

    pub fn diag(a: f64, b: f64, c: f64) -> Self {
        Self::new(a, b, c, 0.0, 0.0, 0.0)
    }

    /// Component (i, j), zero-based.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.c[VOIGT_INDEX[i][j]]
    }

    /// Symmetrizes a full matrix.
    pub fn from_matrix(m: &[[f64; 3]; 3]) -> Self {
        Self::new(
            m[0][0],
            m[1][1],
            m[2][2],
            0.5 * (m[1][2] + m[2][1]),
            0.5 * (m[0][2] + m[2][0]),
            0.5 * (m[0][1] + m[1][0]),
        )
    }

    pub fn to_matrix(&self) -> [[f64; 3]; 3] {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.get(i, j);
            }
        }
        m
    }

    /// Voigt vector of tensor components (stress convention).
    pub fn to_voigt(&self) -> Voigt6 {
        Voigt6::from_column_slice(&self.c)
    }

    pub fn from_voigt(v: &Voigt6) -> Self {
        Self { c: [v[0], v[1], v[2], v[3], v[4], v[5]] }
    }

    /// Voigt vector with engineering shears (strain convention).
    pub fn to_voigt_eng(&self) -> Voigt6 {
        let c = &self.c;
        Voigt6::from_column_slice(&[c[0], c[1], c[2], 2.0 * c[3], 2.0 * c[4], 2.0 * c[5]])
    }

    pub fn from_voigt_eng(v: &Voigt6) -> Self {
        Self::new(v[0], v[1], v[2], 0.5 * v[3], 0.5 * v[4], 0.5 * v[5])
    }

    pub fn trace(&self) -> f64 {
        self.c[0] + self.c[1] + self.c[2]
    }

    /// Deviatoric part.
    pub fn dev(&self) -> Self {
        let m = self.trace() / 3.0;
        let mut d = *self;
        d.c[0] -= m;
        d.c[1] -= m;
        d.c[2] -= m;
        d
    }

    /// Double contraction a:b.
    pub fn ddot(&self, other: &Self) -> f64 {
        let (a, b) = (&self.c, &other.c);
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + 2.0 * (a[3] * b[3] + a[4] * b[4] + a[5] * b[5])
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.ddot(self).sqrt()
    }

    /// Matrix-vector product T·v.
    pub fn dot(&self, v: &Vec3) -> Vec3 {
        let mut r = [0.0; 3];
        for (i, ri) in r.iter_mut().enumerate() {
            *ri = self.get(i, 0) * v[0] + self.get(i, 1) * v[1] + self.get(i, 2) * v[2];
        }
        r
    }

    /// T·T.
    pub fn square(&self) -> Self {
        let m = self.to_matrix();
        let mut p = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                p[i][j] = (0..3).map(|k| m[i][k] * m[k][j]).sum();
            }
        }
        Self::from_matrix(&p)
    }

    /// Symmetric dyad ½(a⊗b + b⊗a).
    pub fn sym_outer(a: &Vec3, b: &Vec3) -> Self {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = 0.5 * (a[i] * b[j] + b[i] * a[j]);
            }
        }
        Self::from_matrix(&m)
    }

    /// a⊗a.
    pub fn outer(a: &Vec3) -> Self {
        Self::sym_outer(a, a)
    }

    /// Q·T·Qᵀ for a rotation given row-wise.
    pub fn rotate(&self, q: &[[f64; 3]; 3]) -> Self {
        let m = self.to_matrix();
        let mut r = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    for l in 0..3 {
                        s += q[i][k] * m[k][l] * q[j][l];
                    }
                }
                r[i][j] = s;
            }
        }
        Self::from_matrix(&r)
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|x| x.is_finite())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { c: self.c.map(|x| x * s) }
    }
}

impl Add for SymTensor3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { c: std::array::from_fn(|i| self.c[i] + o.c[i]) }
    }
}

impl Sub for SymTensor3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { c: std::array::from_fn(|i| self.c[i] - o.c[i]) }
    }
}

impl Neg for SymTensor3 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Mul<SymTensor3> for f64 {
    type Output = SymTensor3;
    fn mul(self, t: SymTensor3) -> SymTensor3 {
        t.scale(self)
    }
}

/// Invariants of ε and pseudo-invariants of the pair (ε, n).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantSet {
    /// tr ε
    pub i1: f64,
    /// ½[(tr ε)² − tr(ε²)]
    pub i2: f64,
    /// n·εn
    pub i4: f64,
    /// n·ε²n
    pub i5: f64,
    /// Regularized I4.
    pub i4_hat: f64,
    /// Regularized I5.
    pub i5_hat: f64,
}

impl InvariantSet {
    /// Replaces the regularized pair by factor·(I4, I5).
    pub fn with_factor(mut self, factor: f64) -> Self {
        self.i4_hat = factor * self.i4;
        self.i5_hat = factor * self.i5;
        self
    }
}

/// Tolerance on ‖n‖ − 1 accepted by [`invariants`].
pub const UNIT_TOL: f64 = 1e-8;

/// I1, I2, I4, I5 with the regularized pair equal to the raw one.
pub fn invariants(eps: &SymTensor3, n: &Vec3) -> Result<InvariantSet, TensorError> {
    if !eps.is_finite() || !n.iter().all(|x| x.is_finite()) {
        return Err(TensorError::InvalidInput("non-finite tensor or vector".into()));
    }
    let nn = norm3(n);
    if (nn - 1.0).abs() > UNIT_TOL {
        return Err(TensorError::InvalidInput(format!("normal has norm {nn}, expected 1")));
    }
    Ok(invariants_unchecked(eps, n))
}

pub(crate) fn invariants_unchecked(eps: &SymTensor3, n: &Vec3) -> InvariantSet {
    let i1 = eps.trace();
    let i2 = 0.5 * (i1 * i1 - eps.ddot(eps));
    let en = eps.dot(n);
    let i4 = dot3(n, &en);
    let i5 = dot3(&en, &en);
    InvariantSet { i1, i2, i4, i5, i4_hat: i4, i5_hat: i5 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bracket {
    Plus,
    Minus,
}

/// ⟨x⟩± = (x ± |x|)/2.
#[inline]
pub fn macaulay(x: f64, sign: Bracket) -> f64 {
    match sign {
        Bracket::Plus => x.max(0.0),
        Bracket::Minus => x.min(0.0),
    }
}

#[inline]
pub fn dot3(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm3(a: &Vec3) -> f64 {
    dot3(a, a).sqrt()
}

pub fn cross3(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Unit engineering-strain perturbation of Voigt slot `j` as a tensor.
pub fn unit_eng_strain(j: usize) -> SymTensor3 {
    let mut t = SymTensor3::ZERO;
    t.c[j] = if j < 3 { 1.0 } else { 0.5 };
    t
}

/// Builds a tangent column by column from a map that is linear in ε.
pub fn tangent_of_linear(f: impl Fn(&SymTensor3) -> SymTensor3) -> Tangent6 {
    let mut t = Tangent6::zeros();
    for j in 0..6 {
        let s = f(&unit_eng_strain(j));
        for i in 0..6 {
            t[(i, j)] = s.c[i];
        }
    }
    t
}

/// Isotropic elastic tangent λ 1⊗1 + 2μ 𝕀 in engineering Voigt form.
pub fn isotropic_tangent(lambda: f64, mu: f64) -> Tangent6 {
    let mut t = Tangent6::zeros();
    for i in 0..3 {
        for j in 0..3 {
            t[(i, j)] = lambda;
        }
        t[(i, i)] += 2.0 * mu;
        t[(i + 3, i + 3)] = mu;
    }
    t
}
