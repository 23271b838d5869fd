//! Non-variational active/passive models SS1 and SS2.
//!
//! Both switch on the sign of ε:N with N = n⊗n; a zero value and a missing
//! normal take the active branch. Neither model has an energy.

use super::degradation::quadratic;
use super::{sigma0, ConstitutiveOutput, MaterialParams, PhasePoint};
use crate::tensor::{tangent_of_linear, SymTensor3, Vec3};

fn output(sigma: SymTensor3, map: impl Fn(&SymTensor3) -> SymTensor3) -> ConstitutiveOutput {
    ConstitutiveOutput {
        psi: None,
        sigma,
        tangent: tangent_of_linear(map),
        dpsi_dd: None,
        d2psi_dd2: None,
        dpsi_dgradd: [0.0; 3],
    }
}

fn active_branch(eps: &SymTensor3, n: Option<&Vec3>) -> bool {
    n.is_none_or(|n| crate::tensor::dot3(n, &eps.dot(n)) >= 0.0)
}

pub(crate) fn ss1(eps: &SymTensor3, phase: &PhasePoint, mat: &MaterialParams) -> ConstitutiveOutput {
    let g = quadratic(phase.d, mat.k_residual).g;
    let normal = phase.normal();
    let active = active_branch(eps, normal.as_ref());
    let mat = *mat;
    let map = move |e: &SymTensor3| -> SymTensor3 {
        match normal {
            Some(n) if !active => {
                let nn = SymTensor3::outer(&n);
                g * sigma0(e, &mat) + ((1.0 - g) * mat.p_modulus() * e.ddot(&nn)) * nn
            }
            _ => g * sigma0(e, &mat),
        }
    };
    output(map(eps), map)
}

/// SS2 stress map for a fixed branch.
///
/// The printed μ(g−1)(Nε+εN) shear term is replaced by
/// 2μ(g−1)(Nε+εN−(ε:N)N): it leaves the normal response (and the
/// uniaxial d = 1 expression) unchanged while giving σ₁₂ = g·2με₁₂ in
/// pure shear across the crack.
fn ss2_map(e: &SymTensor3, n: &Vec3, g: f64, active: bool, mat: &MaterialParams) -> SymTensor3 {
    let (l, m) = (mat.lambda, mat.mu);
    let pm = mat.p_modulus();
    let nn = SymTensor3::outer(n);
    let tr = e.trace();
    let en = e.ddot(&nn);
    let ne = SymTensor3::sym_outer(n, &e.dot(n)).scale(2.0);
    let shear = (2.0 * m * (g - 1.0)) * (ne - en * nn);
    if active {
        let r = l * l / pm;
        ((l + (g - 1.0) * r) * tr) * SymTensor3::IDENTITY
            + (2.0 * m) * *e
            + ((g - 1.0) * (l + r)) * (tr * nn + en * SymTensor3::IDENTITY)
            + (4.0 * (1.0 - g) * (pm - r) * en) * nn
            + shear
    } else {
        sigma0(e, mat) + (4.0 * m * (1.0 - g) * en) * nn + shear
    }
}

pub(crate) fn ss2(eps: &SymTensor3, phase: &PhasePoint, mat: &MaterialParams) -> ConstitutiveOutput {
    let g = quadratic(phase.d, mat.k_residual).g;
    let mat = *mat;
    match phase.normal() {
        None => output(sigma0(eps, &mat), move |e| sigma0(e, &mat)),
        Some(n) => {
            let active = active_branch(eps, Some(&n));
            output(ss2_map(eps, &n, g, active, &mat), move |e| ss2_map(e, &n, g, active, &mat))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat() -> MaterialParams {
        let mut m = MaterialParams::new(1.1538, 0.76923, 1.0, 1.0);
        m.k_residual = 0.0;
        m
    }

    #[test]
    fn ss1_active_is_degraded_isotropic() {
        let m = mat();
        let eps = SymTensor3::new(1e-3, 2e-3, -1e-4, 3e-4, 1e-4, -2e-4);
        let out = ss1(&eps, &PhasePoint::with_normal(0.4, [0.0, 1.0, 0.0]), &m);
        assert!((out.sigma - 0.36 * sigma0(&eps, &m)).norm() < 1e-15);
    }

    #[test]
    fn ss1_pristine_either_branch() {
        let m = mat();
        for e22 in [1e-3, -1e-3] {
            let eps = SymTensor3::new(2e-4, e22, 0.0, 0.0, 0.0, 5e-4);
            let out = ss1(&eps, &PhasePoint::with_normal(0.0, [0.0, 1.0, 0.0]), &m);
            assert!((out.sigma - sigma0(&eps, &m)).norm() < 1e-15);
        }
    }

    #[test]
    fn ss2_uniaxial_broken_matches_printed_brace() {
        let m = mat();
        let (l, mu) = (m.lambda, m.mu);
        let pm = l + 2.0 * mu;
        let r = l * l / pm;
        let brace = l - r - 2.0 * (l + r) + 4.0 * (pm - r);
        let e22 = 1e-3;
        let out = ss2(&SymTensor3::diag(0.0, e22, 0.0), &PhasePoint::with_normal(1.0, [0.0, 1.0, 0.0]), &m);
        assert!((out.sigma.c[1] - brace * e22).abs() < 1e-15);
    }

    #[test]
    fn ss_shear_ratio_is_quadratic_degradation() {
        let m = mat();
        let gam = 1e-3;
        for d in [0.0, 0.25, 0.5, 1.0] {
            let p = PhasePoint::with_normal(d, [0.0, 1.0, 0.0]);
            let eps = SymTensor3::plane(0.0, 0.0, gam);
            let want = (1.0 - d) * (1.0 - d) * 2.0 * m.mu * gam;
            assert!((ss1(&eps, &p, &m).sigma.c[5] - want).abs() < 1e-15);
            assert!((ss2(&eps, &p, &m).sigma.c[5] - want).abs() < 1e-15);
        }
    }

    #[test]
    fn missing_normal_falls_back() {
        let m = mat();
        let eps = SymTensor3::new(1e-3, -2e-3, 0.0, 0.0, 0.0, 4e-4);
        let p = PhasePoint::new(0.5, [0.0; 3]);
        assert!((ss1(&eps, &p, &m).sigma - 0.25 * sigma0(&eps, &m)).norm() < 1e-15);
        assert!((ss2(&eps, &p, &m).sigma - sigma0(&eps, &m)).norm() < 1e-15);
    }
}
