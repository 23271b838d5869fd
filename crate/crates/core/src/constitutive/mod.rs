//! Tension-compression split models for phase-field fracture.
//!
//! Every model maps (ε, d, ∇d, material) to stress and tangent. The
//! variational ones also return Ψ, ∂Ψ/∂d, ∂²Ψ/∂d² and, for the
//! crack-orientation model, the flux ∂Ψ/∂(∇d).

pub mod check;
mod crack_frame;
pub mod degradation;
mod split;
mod strobl_seelig;
pub mod tables;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tensor::{norm3, SymTensor3, Tangent6, TensorError, Vec3};

pub use degradation::{degradation, shear_degradation, sk_degradation};
pub use tables::{calibrate_phase, CalibrationTable, CrackShape, ShearFitTable};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstitutiveError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{what} = {value} outside tabulated range [{lo}, {hi}]")]
    OutOfRange { what: &'static str, value: f64, lo: f64, hi: f64 },
    #[error("model {0} has no energy; driving force unavailable")]
    UnsupportedModel(ModelKind),
}

impl From<TensorError> for ConstitutiveError {
    fn from(e: TensorError) -> Self {
        match e {
            TensorError::InvalidInput(s) => ConstitutiveError::InvalidInput(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Isotropic,
    VolDev,
    Spectral,
    Wu,
    Ss1,
    Ss2,
    Sk,
    Proposed,
}

impl ModelKind {
    pub const ALL: [ModelKind; 8] = [
        ModelKind::Isotropic,
        ModelKind::VolDev,
        ModelKind::Spectral,
        ModelKind::Wu,
        ModelKind::Ss1,
        ModelKind::Ss2,
        ModelKind::Sk,
        ModelKind::Proposed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Isotropic => "isotropic",
            ModelKind::VolDev => "vol-dev",
            ModelKind::Spectral => "spectral",
            ModelKind::Wu => "wu",
            ModelKind::Ss1 => "ss1",
            ModelKind::Ss2 => "ss2",
            ModelKind::Sk => "sk",
            ModelKind::Proposed => "proposed",
        }
    }

    pub fn from_name(s: &str) -> Option<ModelKind> {
        Self::ALL.into_iter().find(|m| m.name() == s)
    }

    /// Models with a stored energy Ψ.
    pub fn is_variational(self) -> bool {
        !matches!(self, ModelKind::Ss1 | ModelKind::Ss2)
    }

    /// Whether ∂Ψ/∂d is affine in d (quadratic degradation only).
    pub fn affine_driving_force(self) -> bool {
        matches!(self, ModelKind::Isotropic | ModelKind::VolDev | ModelKind::Spectral | ModelKind::Wu)
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Elastic and fracture constants. Stresses come out in the units of λ, μ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    pub lambda: f64,
    pub mu: f64,
    pub gc: f64,
    pub ell: f64,
    pub k_residual: f64,
    pub alpha_reg: f64,
    pub sk_b: f64,
}

pub const DEFAULT_K_RESIDUAL: f64 = 1e-6;
pub const DEFAULT_ALPHA_REG: f64 = 5.66e-4;
pub const DEFAULT_SK_B: f64 = 2.0;

impl MaterialParams {
    pub fn new(lambda: f64, mu: f64, gc: f64, ell: f64) -> Self {
        Self {
            lambda,
            mu,
            gc,
            ell,
            k_residual: DEFAULT_K_RESIDUAL,
            alpha_reg: DEFAULT_ALPHA_REG,
            sk_b: DEFAULT_SK_B,
        }
    }

    /// K = λ + 2μ/3.
    pub fn bulk(&self) -> f64 {
        self.lambda + 2.0 * self.mu / 3.0
    }

    /// ν = λ/(2(λ+μ)).
    pub fn nu(&self) -> f64 {
        self.lambda / (2.0 * (self.lambda + self.mu))
    }

    /// λ + 2μ.
    pub fn p_modulus(&self) -> f64 {
        self.lambda + 2.0 * self.mu
    }

    pub fn validate(&self) -> Result<(), ConstitutiveError> {
        let bad = |field: &str, why: &str| Err(ConstitutiveError::InvalidInput(format!("{field}: {why}")));
        let all = [self.lambda, self.mu, self.gc, self.ell, self.k_residual, self.alpha_reg, self.sk_b];
        if all.iter().any(|x| !x.is_finite()) {
            return bad("material", "non-finite parameter");
        }
        if self.mu <= 0.0 {
            return bad("mu", "must be positive");
        }
        if self.p_modulus() <= 0.0 {
            return bad("lambda", "lambda + 2 mu must be positive");
        }
        if self.gc <= 0.0 {
            return bad("gc", "must be positive");
        }
        if self.ell <= 0.0 {
            return bad("ell", "must be positive");
        }
        if !(0.0..0.1).contains(&self.k_residual) {
            return bad("k_residual", "must lie in [0, 0.1)");
        }
        if self.alpha_reg <= 0.0 {
            return bad("alpha_reg", "must be positive");
        }
        if self.sk_b.abs() < 1e-8 {
            return bad("sk_b", "must be nonzero");
        }
        Ok(())
    }
}

/// Gradient norms below this value are treated as zero.
pub const GRAD_EPS: f64 = 1e-14;

/// Phase-field state at a material point.
///
/// A prescribed normal marks points whose crack direction is known a priori
/// (sweeps, elements inside an initial crack band). There the regularization
/// factor is 1 and Ψ does not depend on ∇d.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub d: f64,
    pub grad_d: Vec3,
    pub prescribed_normal: Option<Vec3>,
}

/// Crack normal in use at a point plus how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct NormalInfo {
    pub n: Vec3,
    /// tanh(αℓ²|∇d|²), or 1 for a prescribed normal.
    pub factor: f64,
    /// |∇d| when n comes from the gradient.
    pub grad_norm: Option<f64>,
}

impl PhasePoint {
    pub fn new(d: f64, grad_d: Vec3) -> Self {
        Self { d, grad_d, prescribed_normal: None }
    }

    pub fn with_normal(d: f64, n: Vec3) -> Self {
        Self { d, grad_d: [0.0; 3], prescribed_normal: Some(n) }
    }

    /// ∇d/|∇d| when the gradient is nonzero, or the prescribed normal.
    pub fn normal(&self) -> Option<Vec3> {
        if let Some(n) = self.prescribed_normal {
            return Some(n);
        }
        let g = norm3(&self.grad_d);
        (g >= GRAD_EPS).then(|| self.grad_d.map(|x| x / g))
    }

    pub fn validate(&self) -> Result<(), ConstitutiveError> {
        if !(0.0..=1.0).contains(&self.d) {
            return Err(ConstitutiveError::InvalidInput(format!("phase field d = {} outside [0, 1]", self.d)));
        }
        if !self.grad_d.iter().all(|x| x.is_finite()) {
            return Err(ConstitutiveError::InvalidInput("non-finite phase-field gradient".into()));
        }
        if let Some(n) = self.prescribed_normal {
            let nn = norm3(&n);
            if !nn.is_finite() || (nn - 1.0).abs() > crate::tensor::UNIT_TOL {
                return Err(ConstitutiveError::InvalidInput(format!("prescribed normal has norm {nn}")));
            }
        }
        Ok(())
    }

    pub(crate) fn normal_info(&self, mat: &MaterialParams) -> NormalInfo {
        if let Some(n) = self.prescribed_normal {
            return NormalInfo { n, factor: 1.0, grad_norm: None };
        }
        let g = norm3(&self.grad_d);
        if g < GRAD_EPS {
            return NormalInfo { n: [0.0, 1.0, 0.0], factor: 0.0, grad_norm: None };
        }
        NormalInfo {
            n: self.grad_d.map(|x| x / g),
            factor: regularization_factor(g, mat.ell, mat.alpha_reg),
            grad_norm: Some(g),
        }
    }
}

/// tanh(αℓ²|∇d|²).
pub fn regularization_factor(grad_norm: f64, ell: f64, alpha: f64) -> f64 {
    (alpha * ell * ell * grad_norm * grad_norm).tanh()
}

/// (Î4, Î5) = tanh(αℓ²|∇d|²)·(I4, I5).
pub fn regularize(i4: f64, i5: f64, grad_d: &Vec3, ell: f64, alpha: f64) -> (f64, f64) {
    let f = regularization_factor(norm3(grad_d), ell, alpha);
    (f * i4, f * i5)
}

/// Energy, stress, tangent and driving-force data at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstitutiveOutput {
    /// Ψ; `None` for models without an energy.
    pub psi: Option<f64>,
    pub sigma: SymTensor3,
    /// ∂σ/∂ε_eng in Voigt order.
    pub tangent: Tangent6,
    /// ∂Ψ/∂d; `None` for models without an energy.
    pub dpsi_dd: Option<f64>,
    /// ∂²Ψ/∂d².
    pub d2psi_dd2: Option<f64>,
    /// ∂Ψ/∂(∇d).
    pub dpsi_dgradd: Vec3,
}

/// Evaluates `model` with the bundled shear-fit table.
pub fn evaluate(
    model: ModelKind,
    eps: &SymTensor3,
    phase: &PhasePoint,
    mat: &MaterialParams,
) -> Result<ConstitutiveOutput, ConstitutiveError> {
    evaluate_with(model, eps, phase, mat, ShearFitTable::builtin())
}

pub fn evaluate_with(
    model: ModelKind,
    eps: &SymTensor3,
    phase: &PhasePoint,
    mat: &MaterialParams,
    table: &ShearFitTable,
) -> Result<ConstitutiveOutput, ConstitutiveError> {
    if !eps.is_finite() {
        return Err(ConstitutiveError::InvalidInput("non-finite strain".into()));
    }
    phase.validate()?;
    mat.validate()?;
    let d = phase.d;
    Ok(match model {
        ModelKind::Isotropic => split::isotropic(eps, d, mat),
        ModelKind::VolDev => split::vol_dev(eps, d, mat),
        ModelKind::Spectral => split::spectral(eps, d, mat),
        ModelKind::Wu => split::wu(eps, d, mat),
        ModelKind::Ss1 => strobl_seelig::ss1(eps, phase, mat),
        ModelKind::Ss2 => strobl_seelig::ss2(eps, phase, mat),
        ModelKind::Sk => crack_frame::sk(eps, phase, mat),
        ModelKind::Proposed => {
            let (a, b) = table.coefficients(mat.nu())?;
            crack_frame::proposed(eps, phase, mat, a, b)
        }
    })
}

/// (∂Ψ/∂d, ∂Ψ/∂(∇d)) for a variational model.
pub fn driving_force(
    model: ModelKind,
    eps: &SymTensor3,
    phase: &PhasePoint,
    mat: &MaterialParams,
) -> Result<(f64, Vec3), ConstitutiveError> {
    if !model.is_variational() {
        return Err(ConstitutiveError::UnsupportedModel(model));
    }
    let out = evaluate(model, eps, phase, mat)?;
    Ok((out.dpsi_dd.unwrap_or(0.0), out.dpsi_dgradd))
}

/// Ψ₀ = λ/2 (tr ε)² + μ ε:ε.
pub fn psi0(eps: &SymTensor3, mat: &MaterialParams) -> f64 {
    let tr = eps.trace();
    0.5 * mat.lambda * tr * tr + mat.mu * eps.ddot(eps)
}

/// σ₀ = λ tr ε 1 + 2μ ε.
pub fn sigma0(eps: &SymTensor3, mat: &MaterialParams) -> SymTensor3 {
    (mat.lambda * eps.trace()) * SymTensor3::IDENTITY + (2.0 * mat.mu) * *eps
}
