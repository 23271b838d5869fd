//! Crack-orientation energy in invariant form, shared by the proposed model
//! and SK.
//!
//! Ψ = H(β)Ψ_t + (1 − H(β))Ψ_c + Ψ_s with β = λI1 + 2μÎ4 and
//!
//! - Ψ_t = [g_t β² + 4μ(λ+μ)(I1² + Î4² − 2I2 − 2Î5) + 4λμ(I2 − I1Î4 + Î5)] / (2(λ+2μ))
//! - Ψ_c = ½[λI1² + 2μ(I1² + 2Î4² − 2I2 − 2Î5)]
//! - Ψ_s = g_s·2μ(Î5 − Î4²)
//!
//! where Î = f·I and f is the regularization factor. H(0) = 0.

use super::degradation::{exponential, quadratic, shear, Degradation};
use super::{ConstitutiveOutput, MaterialParams, NormalInfo, PhasePoint};
use crate::tensor::{
    coaxial_tangent, dot3, eig_unchecked, invariants_unchecked, tangent_of_linear, PrincipalResponse, SymTensor3,
    Tangent6, Vec3, Voigt6,
};

/// First and second partials of Ψ in (I1, I2, Î4, Î5). Ψ is linear in I2 and Î5.
#[derive(Debug, Clone, Copy, Default)]
struct Partials {
    p1: f64,
    p2: f64,
    p4: f64,
    p5: f64,
    p11: f64,
    p14: f64,
    p44: f64,
}

struct Energy {
    psi: f64,
    dpsi_dd: f64,
    d2psi_dd2: f64,
    p: Partials,
}

fn energy(i1: f64, i2: f64, j4: f64, j5: f64, gt: Degradation, gs: Degradation, mat: &MaterialParams) -> Energy {
    let (l, m) = (mat.lambda, mat.mu);
    let pm = mat.p_modulus();
    let beta = l * i1 + 2.0 * m * j4;
    let mut p = Partials { p2: -2.0 * m, p5: -2.0 * m, ..Default::default() };
    let (mut psi, mut dpsi, mut d2psi);
    if beta > 0.0 {
        let c1 = 4.0 * m * (l + m);
        let c2 = 4.0 * l * m;
        psi = (gt.g * beta * beta + c1 * (i1 * i1 + j4 * j4 - 2.0 * i2 - 2.0 * j5) + c2 * (i2 - i1 * j4 + j5))
            / (2.0 * pm);
        p.p1 = (2.0 * gt.g * beta * l + 2.0 * c1 * i1 - c2 * j4) / (2.0 * pm);
        p.p4 = (4.0 * m * gt.g * beta + 2.0 * c1 * j4 - c2 * i1) / (2.0 * pm);
        p.p11 = (2.0 * gt.g * l * l + 2.0 * c1) / (2.0 * pm);
        p.p14 = 2.0 * l * m * (gt.g - 1.0) / pm;
        p.p44 = (8.0 * m * m * gt.g + 2.0 * c1) / (2.0 * pm);
        dpsi = gt.dg * beta * beta / (2.0 * pm);
        d2psi = gt.d2g * beta * beta / (2.0 * pm);
    } else {
        psi = 0.5 * (l * i1 * i1 + 2.0 * m * (i1 * i1 + 2.0 * j4 * j4 - 2.0 * i2 - 2.0 * j5));
        p.p1 = pm * i1;
        p.p4 = 4.0 * m * j4;
        p.p11 = pm;
        p.p44 = 4.0 * m;
        dpsi = 0.0;
        d2psi = 0.0;
    }
    let shear_inv = j5 - j4 * j4;
    psi += gs.g * 2.0 * m * shear_inv;
    p.p4 += -4.0 * m * gs.g * j4;
    p.p5 += 2.0 * m * gs.g;
    p.p44 += -4.0 * m * gs.g;
    dpsi += gs.dg * 2.0 * m * shear_inv;
    d2psi += gs.d2g * 2.0 * m * shear_inv;
    Energy { psi, dpsi_dd: dpsi, d2psi_dd2: d2psi, p }
}

/// ∂I2/∂ε as tensor components.
fn a2(e: &SymTensor3) -> SymTensor3 {
    e.trace() * SymTensor3::IDENTITY - *e
}

/// ∂I5/∂ε = εn⊗n + n⊗εn as tensor components.
fn a5(e: &SymTensor3, n: &Vec3) -> SymTensor3 {
    SymTensor3::sym_outer(&e.dot(n), n).scale(2.0)
}

/// Full evaluation for a given normal and regularization.
fn evaluate(eps: &SymTensor3, info: &NormalInfo, gt: Degradation, gs: Degradation, mat: &MaterialParams) -> ConstitutiveOutput {
    let n = info.n;
    let f = info.factor;
    let inv = invariants_unchecked(eps, &n).with_factor(f);
    let en = energy(inv.i1, inv.i2, inv.i4_hat, inv.i5_hat, gt, gs, mat);
    let p = en.p;

    let a1 = SymTensor3::IDENTITY;
    let a4 = SymTensor3::outer(&n);
    let sigma = p.p1 * a1 + p.p2 * a2(eps) + (p.p4 * f) * a4 + (p.p5 * f) * a5(eps, &n);

    let v1: Voigt6 = a1.to_voigt();
    let v4: Voigt6 = a4.to_voigt();
    let mut tangent: Tangent6 = v1 * v1.transpose() * p.p11
        + (v1 * v4.transpose() + v4 * v1.transpose()) * (p.p14 * f)
        + v4 * v4.transpose() * (p.p44 * f * f);
    tangent += tangent_of_linear(a2) * p.p2;
    tangent += tangent_of_linear(|e| a5(e, &n)) * (p.p5 * f);

    let flux = match info.grad_norm {
        Some(gn) => {
            let en_v = eps.dot(&n);
            let e2n = eps.dot(&en_v);
            let s = mat.alpha_reg * mat.ell * mat.ell * gn * gn;
            let sech2 = 1.0 - s.tanh().powi(2);
            // ∂f/∂(∇d) = sech²(s)·2αℓ²∇d, ∇d = gn·n.
            let dfd = 2.0 * mat.alpha_reg * mat.ell * mat.ell * gn * sech2;
            let project = |v: Vec3| -> Vec3 {
                let vn = dot3(&v, &n);
                std::array::from_fn(|i| (v[i] - vn * n[i]) / gn)
            };
            let t4 = project(en_v.map(|x| 2.0 * x));
            let t5 = project(e2n.map(|x| 2.0 * x));
            std::array::from_fn(|i| {
                p.p4 * (inv.i4 * dfd * n[i] + f * t4[i]) + p.p5 * (inv.i5 * dfd * n[i] + f * t5[i])
            })
        }
        None => [0.0; 3],
    };

    ConstitutiveOutput {
        psi: Some(en.psi),
        sigma,
        tangent,
        dpsi_dd: Some(en.dpsi_dd),
        d2psi_dd2: Some(en.d2psi_dd2),
        dpsi_dgradd: flux,
    }
}

pub(crate) fn proposed(eps: &SymTensor3, phase: &PhasePoint, mat: &MaterialParams, a: f64, b: f64) -> ConstitutiveOutput {
    let info = phase.normal_info(mat);
    evaluate(eps, &info, quadratic(phase.d, mat.k_residual), shear(phase.d, a, b), mat)
}

/// SK: fixed crack frame when a normal is prescribed, otherwise n is the
/// maximum principal direction of the undamaged stress, which coincides
/// with that of ε.
pub(crate) fn sk(eps: &SymTensor3, phase: &PhasePoint, mat: &MaterialParams) -> ConstitutiveOutput {
    let g = exponential(phase.d, mat.sk_b, mat.k_residual);
    if let Some(n) = phase.prescribed_normal {
        let info = NormalInfo { n, factor: 1.0, grad_norm: None };
        return evaluate(eps, &info, g, g, mat);
    }
    sk_principal(eps, g, mat)
}

fn sk_principal(eps: &SymTensor3, g: Degradation, mat: &MaterialParams) -> ConstitutiveOutput {
    let (l, m) = (mat.lambda, mat.mu);
    let pm = mat.p_modulus();
    let eig = eig_unchecked(eps);
    let e = eig.values;
    let beta = l * (e[0] + e[1] + e[2]) + 2.0 * m * e[0];
    let tension = beta > 0.0;
    let c = if tension { g.g } else { 1.0 };
    let tang = (4.0 * m * (l + m) * (e[1] * e[1] + e[2] * e[2]) + 4.0 * l * m * e[1] * e[2]) / (2.0 * pm);
    let psi = c * beta * beta / (2.0 * pm) + tang;
    let lat = |a: f64, b: f64| (4.0 * m * (l + m) * a + 2.0 * l * m * b) / pm;
    let resp = PrincipalResponse {
        stress: [c * beta, c * beta * l / pm + lat(e[1], e[2]), c * beta * l / pm + lat(e[2], e[1])],
        jacobian: [
            [c * pm, c * l, c * l],
            [c * l, c * l * l / pm + 4.0 * m * (l + m) / pm, c * l * l / pm + 2.0 * l * m / pm],
            [c * l, c * l * l / pm + 2.0 * l * m / pm, c * l * l / pm + 4.0 * m * (l + m) / pm],
        ],
    };
    let mut sigma = SymTensor3::ZERO;
    for a in 0..3 {
        sigma = sigma + resp.stress[a] * SymTensor3::outer(&eig.vectors[a]);
    }
    let w = if tension { beta * beta / (2.0 * pm) } else { 0.0 };
    ConstitutiveOutput {
        psi: Some(psi),
        sigma,
        tangent: coaxial_tangent(&eig, &resp),
        dpsi_dd: Some(g.dg * w),
        d2psi_dd2: Some(g.d2g * w),
        dpsi_dgradd: [0.0; 3],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::{psi0, ShearFitTable};

    fn mat() -> MaterialParams {
        let mut m = MaterialParams::new(1.1538, 0.76923, 1.0, 1.0);
        m.k_residual = 0.0;
        m
    }

    fn coeffs(m: &MaterialParams) -> (f64, f64) {
        ShearFitTable::builtin().coefficients(m.nu()).unwrap()
    }

    #[test]
    fn uniaxial_compression_is_undegraded() {
        let m = mat();
        let (a, b) = coeffs(&m);
        let e22 = -1e-3;
        let eps = SymTensor3::diag(0.0, e22, 0.0);
        let out = proposed(&eps, &PhasePoint::with_normal(0.9, [0.0, 1.0, 0.0]), &m, a, b);
        assert!((out.psi.unwrap() - psi0(&eps, &m)).abs() < 1e-18);
        assert!((out.sigma.c[1] - m.p_modulus() * e22).abs() < 1e-15);
    }

    #[test]
    fn perfect_square_zero_makes_tension_energy_independent_of_d() {
        let m = mat();
        let (a, b) = coeffs(&m);
        let e11 = 1e-3;
        let e22 = -m.lambda * e11 / m.p_modulus() + 1e-15;
        let eps = SymTensor3::diag(e11, e22, 0.0);
        let psis: Vec<f64> = [0.0, 0.5, 1.0]
            .iter()
            .map(|&d| proposed(&eps, &PhasePoint::with_normal(d, [0.0, 1.0, 0.0]), &m, a, b).psi.unwrap())
            .collect();
        assert!((psis[0] - psis[1]).abs() < 1e-18 && (psis[0] - psis[2]).abs() < 1e-18);
    }

    #[test]
    fn sk_pure_shear_with_crack_normal() {
        let m = mat();
        let gam = 1e-3;
        for d in [0.0, 0.4, 1.0] {
            let out = sk(&SymTensor3::plane(0.0, 0.0, gam), &PhasePoint::with_normal(d, [0.0, 1.0, 0.0]), &m);
            let g = exponential(d, m.sk_b, 0.0).g;
            assert!((out.sigma.c[5] - g * 2.0 * m.mu * gam).abs() < 1e-15);
        }
    }

    #[test]
    fn sk_principal_frame_matches_fixed_frame_along_principal_axis() {
        let m = mat();
        let eps = SymTensor3::new(2e-3, -5e-4, 3e-4, 1e-4, -2e-4, 4e-4);
        let eig = eig_unchecked(&eps);
        let fixed = sk(&eps, &PhasePoint::with_normal(0.6, eig.vectors[0]), &m);
        let free = sk(&eps, &PhasePoint::new(0.6, [0.0; 3]), &m);
        assert!((fixed.psi.unwrap() - free.psi.unwrap()).abs() < 1e-15);
        assert!((fixed.sigma - free.sigma).norm() < 1e-12);
    }
}
