//! Finite-difference consistency checks for σ = ∂Ψ/∂ε and ℂ = ∂σ/∂ε.
//!
//! Central differences in engineering strain with step h = 10⁻⁷‖ε‖. A
//! second estimate at 2h flags points next to a switching surface, where
//! the two disagree far beyond truncation error.

use super::{evaluate, ConstitutiveError, MaterialParams, ModelKind, PhasePoint};
use crate::tensor::{SymTensor3, Voigt6};

/// Relative error of one check and whether the point is branch-interior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdReport {
    pub rel_error: f64,
    pub interior: bool,
}

const STEP: f64 = 1e-7;
const KINK_TOL: f64 = 1e-4;

fn perturbed(eps: &SymTensor3, j: usize, h: f64) -> SymTensor3 {
    let mut v = eps.to_voigt_eng();
    v[j] += h;
    SymTensor3::from_voigt_eng(&v)
}

fn central<T>(eps: &SymTensor3, j: usize, h: f64, f: &impl Fn(&SymTensor3) -> Result<T, ConstitutiveError>, sub: impl Fn(T, T) -> T) -> Result<T, ConstitutiveError> {
    Ok(sub(f(&perturbed(eps, j, h))?, f(&perturbed(eps, j, -h))?))
}

/// Compares σ with the gradient of Ψ.
pub fn stress_consistency(model: ModelKind, eps: &SymTensor3, phase: &PhasePoint, mat: &MaterialParams) -> Result<FdReport, ConstitutiveError> {
    let out = evaluate(model, eps, phase, mat)?;
    if out.psi.is_none() {
        return Err(ConstitutiveError::UnsupportedModel(model));
    }
    let psi = |e: &SymTensor3| evaluate(model, e, phase, mat).map(|o| o.psi.unwrap_or(0.0));
    let h = STEP * eps.norm().max(1e-300);
    let sig = out.sigma.to_voigt();
    let mut fd1 = Voigt6::zeros();
    let mut fd2 = Voigt6::zeros();
    for j in 0..6 {
        fd1[j] = central(eps, j, h, &psi, |a, b| a - b)? / (2.0 * h);
        fd2[j] = central(eps, j, 2.0 * h, &psi, |a, b| a - b)? / (4.0 * h);
    }
    let scale = sig.norm().max(fd1.norm()).max(1e-300);
    Ok(FdReport {
        rel_error: (fd1 - sig).norm() / scale,
        interior: (fd1 - fd2).norm() / scale < KINK_TOL,
    })
}

/// Compares ℂ with the Jacobian of σ.
pub fn tangent_consistency(model: ModelKind, eps: &SymTensor3, phase: &PhasePoint, mat: &MaterialParams) -> Result<FdReport, ConstitutiveError> {
    let out = evaluate(model, eps, phase, mat)?;
    let sig = |e: &SymTensor3| evaluate(model, e, phase, mat).map(|o| o.sigma.to_voigt());
    let h = STEP * eps.norm().max(1e-300);
    let mut err: f64 = 0.0;
    let mut kink: f64 = 0.0;
    let scale = out.tangent.abs().max().max(1e-300);
    for j in 0..6 {
        let c1 = central(eps, j, h, &sig, |a, b| a - b)? / (2.0 * h);
        let c2 = central(eps, j, 2.0 * h, &sig, |a, b| a - b)? / (4.0 * h);
        let col = out.tangent.column(j);
        err = err.max((c1 - col).abs().max());
        kink = kink.max((c1 - c2).abs().max());
    }
    Ok(FdReport { rel_error: err / scale, interior: kink / scale < KINK_TOL })
}

/// Compares ∂Ψ/∂d and ∂²Ψ/∂d² with differences in d, for d away from the ends.
pub fn phase_derivative_consistency(model: ModelKind, eps: &SymTensor3, phase: &PhasePoint, mat: &MaterialParams) -> Result<f64, ConstitutiveError> {
    let h = 1e-6;
    let at = |d: f64| {
        let mut p = *phase;
        p.d = d;
        evaluate(model, eps, &p, mat)
    };
    let (lo, mid, hi) = (at(phase.d - h)?, at(phase.d)?, at(phase.d + h)?);
    let (Some(pl), Some(ph), Some(dm), Some(d2m), Some(dl), Some(dh)) =
        (lo.psi, hi.psi, mid.dpsi_dd, mid.d2psi_dd2, lo.dpsi_dd, hi.dpsi_dd)
    else {
        return Err(ConstitutiveError::UnsupportedModel(model));
    };
    let scale = mid.psi.unwrap_or(0.0).abs().max(1e-300);
    let e1 = ((ph - pl) / (2.0 * h) - dm).abs() / scale;
    let e2 = ((dh - dl) / (2.0 * h) - d2m).abs() / scale;
    Ok(e1.max(e2))
}

/// Compares ∂Ψ/∂(∇d) with differences in the gradient.
pub fn flux_consistency(model: ModelKind, eps: &SymTensor3, phase: &PhasePoint, mat: &MaterialParams) -> Result<f64, ConstitutiveError> {
    let out = evaluate(model, eps, phase, mat)?;
    let gn = crate::tensor::norm3(&phase.grad_d).max(1e-300);
    let h = 1e-6 * gn;
    let mut err: f64 = 0.0;
    let mut scale = crate::tensor::norm3(&out.dpsi_dgradd);
    let mut fd = [0.0; 3];
    for (i, f) in fd.iter_mut().enumerate() {
        let mut p = *phase;
        p.grad_d[i] += h;
        let hi = evaluate(model, eps, &p, mat)?.psi.unwrap_or(0.0);
        p.grad_d[i] -= 2.0 * h;
        let lo = evaluate(model, eps, &p, mat)?.psi.unwrap_or(0.0);
        *f = (hi - lo) / (2.0 * h);
    }
    scale = scale.max(crate::tensor::norm3(&fd)).max(out.psi.unwrap_or(0.0).abs() / gn).max(1e-300);
    for i in 0..3 {
        err = err.max((fd[i] - out.dpsi_dgradd[i]).abs());
    }
    Ok(err / scale)
}
