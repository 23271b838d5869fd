//! Isotropic, volumetric-deviatoric, spectral and Wu splits.

use super::degradation::quadratic;
use super::{psi0, sigma0, ConstitutiveOutput, MaterialParams};
use crate::tensor::{coaxial_tangent, eig_unchecked, isotropic_tangent, PrincipalResponse, SymTensor3, Tangent6};

fn energy_output(psi_plus: f64, psi_minus: f64, g: super::degradation::Degradation, sigma: SymTensor3, tangent: Tangent6) -> ConstitutiveOutput {
    ConstitutiveOutput {
        psi: Some(g.g * psi_plus + psi_minus),
        sigma,
        tangent,
        dpsi_dd: Some(g.dg * psi_plus),
        d2psi_dd2: Some(g.d2g * psi_plus),
        dpsi_dgradd: [0.0; 3],
    }
}

pub(crate) fn isotropic(eps: &SymTensor3, d: f64, mat: &MaterialParams) -> ConstitutiveOutput {
    let g = quadratic(d, mat.k_residual);
    energy_output(
        psi0(eps, mat),
        0.0,
        g,
        g.g * sigma0(eps, mat),
        isotropic_tangent(mat.lambda, mat.mu) * g.g,
    )
}

pub(crate) fn vol_dev(eps: &SymTensor3, d: f64, mat: &MaterialParams) -> ConstitutiveOutput {
    let g = quadratic(d, mat.k_residual);
    let k = mat.bulk();
    let tr = eps.trace();
    let (trp, trm) = (tr.max(0.0), tr.min(0.0));
    let dev = eps.dev();
    let psi_plus = 0.5 * k * trp * trp + mat.mu * dev.ddot(&dev);
    let psi_minus = 0.5 * k * trm * trm;
    let sigma = g.g * ((k * trp) * SymTensor3::IDENTITY + (2.0 * mat.mu) * dev) + (k * trm) * SymTensor3::IDENTITY;

    let kv = if tr > 0.0 { g.g * k } else { k };
    let mut t = Tangent6::zeros();
    for i in 0..3 {
        for j in 0..3 {
            t[(i, j)] = kv - g.g * 2.0 * mat.mu / 3.0;
        }
        t[(i, i)] += g.g * 2.0 * mat.mu;
        t[(i + 3, i + 3)] = g.g * mat.mu;
    }
    energy_output(psi_plus, psi_minus, g, sigma, t)
}

fn principal_sigma(eig: &crate::tensor::EigenSystem, s: [f64; 3]) -> SymTensor3 {
    let mut out = SymTensor3::ZERO;
    for a in 0..3 {
        out = out + s[a] * SymTensor3::outer(&eig.vectors[a]);
    }
    out
}

pub(crate) fn spectral(eps: &SymTensor3, d: f64, mat: &MaterialParams) -> ConstitutiveOutput {
    let g = quadratic(d, mat.k_residual);
    let (l, m) = (mat.lambda, mat.mu);
    let eig = eig_unchecked(eps);
    let e = eig.values;
    let tr: f64 = e.iter().sum();
    let (trp, trm) = (tr.max(0.0), tr.min(0.0));
    let mut psi_plus = 0.5 * l * trp * trp;
    let mut psi_minus = 0.5 * l * trm * trm;
    for ea in e {
        psi_plus += m * ea.max(0.0).powi(2);
        psi_minus += m * ea.min(0.0).powi(2);
    }
    let vol = l * (g.g * trp + trm);
    let dvol = l * if tr > 0.0 { g.g } else { 1.0 };
    let resp = PrincipalResponse {
        stress: e.map(|ea| vol + 2.0 * m * (g.g * ea.max(0.0) + ea.min(0.0))),
        jacobian: std::array::from_fn(|a| {
            std::array::from_fn(|b| dvol + if a == b { 2.0 * m * if e[a] > 0.0 { g.g } else { 1.0 } } else { 0.0 })
        }),
    };
    let sigma = principal_sigma(&eig, resp.stress);
    energy_output(psi_plus, psi_minus, g, sigma, coaxial_tangent(&eig, &resp))
}

/// Positive part of an effective principal stress triple and its Jacobian.
pub(crate) fn wu_positive(sb: [f64; 3], nu: f64, nu_t: f64) -> ([f64; 3], [[f64; 3]; 3]) {
    let e = |i: usize| -> [f64; 3] { std::array::from_fn(|k| if k == i { 1.0 } else { 0.0 }) };
    let scaled = |v: [f64; 3], s: f64| v.map(|x| x * s);
    let zero = [0.0; 3];

    let p1 = sb[0].max(0.0);
    let d1 = if sb[0] > 0.0 { e(0) } else { zero };

    let (m2, dm2) = if sb[1] >= nu_t * sb[0] { (sb[1], e(1)) } else { (nu_t * sb[0], scaled(e(0), nu_t)) };
    let p2 = m2.max(0.0);
    let d2 = if m2 > 0.0 { dm2 } else { zero };

    let side = nu * (sb[0] + sb[1]);
    let (inner, dinner) = if sb[2] >= side { (sb[2], e(2)) } else { (side, [nu, nu, 0.0]) };
    let (m3, dm3) = if inner >= nu_t * sb[0] { (inner, dinner) } else { (nu_t * sb[0], scaled(e(0), nu_t)) };
    let p3 = m3.max(0.0);
    let d3 = if m3 > 0.0 { dm3 } else { zero };

    ([p1, p2, p3], [d1, d2, d3])
}

pub(crate) fn wu(eps: &SymTensor3, d: f64, mat: &MaterialParams) -> ConstitutiveOutput {
    let g = quadratic(d, mat.k_residual);
    let (l, m) = (mat.lambda, mat.mu);
    let nu = mat.nu();
    let nu_t = l / mat.p_modulus();
    let eig = eig_unchecked(eps);
    let e = eig.values;
    let tr: f64 = e.iter().sum();
    let sb = e.map(|ea| l * tr + 2.0 * m * ea);
    let (sp, dsp) = wu_positive(sb, nu, nu_t);

    let dsb = |c: usize, b: usize| l + if c == b { 2.0 * m } else { 0.0 };
    let resp = PrincipalResponse {
        stress: std::array::from_fn(|a| sb[a] + (g.g - 1.0) * sp[a]),
        jacobian: std::array::from_fn(|a| {
            std::array::from_fn(|b| dsb(a, b) + (g.g - 1.0) * (0..3).map(|c| dsp[a][c] * dsb(c, b)).sum::<f64>())
        }),
    };
    let psi_plus = 0.5 * (0..3).map(|a| sp[a] * e[a]).sum::<f64>();
    let psi_minus = 0.5 * (0..3).map(|a| (sb[a] - sp[a]) * e[a]).sum::<f64>();
    let sigma = principal_sigma(&eig, resp.stress);
    energy_output(psi_plus, psi_minus, g, sigma, coaxial_tangent(&eig, &resp))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat() -> MaterialParams {
        let mut m = MaterialParams::new(121.15e3, 80.77e3, 2.7, 40.0);
        m.k_residual = 0.0;
        m
    }

    #[test]
    fn vol_dev_pure_compression_keeps_volumetric_stress() {
        let m = mat();
        let c = 1e-3;
        let out = vol_dev(&SymTensor3::diag(-c, -c, -c), 1.0, &m);
        for i in 0..3 {
            assert!((out.sigma.c[i] + 3.0 * m.bulk() * c).abs() < 1e-9);
        }
    }

    #[test]
    fn spectral_uniaxial_tension_fully_broken_is_stress_free() {
        let out = spectral(&SymTensor3::diag(0.0, 1e-3, 0.0), 1.0, &mat());
        assert!(out.sigma.norm() < 1e-12);
    }

    #[test]
    fn pure_shear_ratios() {
        let m = mat();
        let gam = 1e-3;
        let eps = SymTensor3::plane(0.0, 0.0, gam);
        for d in [0.0, 0.3, 0.7, 1.0] {
            let g = (1.0 - d) * (1.0 - d);
            let vd = vol_dev(&eps, d, &m).sigma.c[5];
            assert!((vd - g * 2.0 * m.mu * gam).abs() < 1e-9);
            let sp = spectral(&eps, d, &m).sigma.c[5];
            assert!((sp - (g + 1.0) * m.mu * gam).abs() < 1e-9);
        }
    }

    // Hand evaluation of the three positive-part rules for σ̄ = diag(s, 0, 0).
    #[test]
    fn wu_uniaxial_effective_stress_rules() {
        let (nu, nu_t) = (0.3, 0.3 / 0.7);
        let s = 2.0;
        let (p, _) = wu_positive([s, 0.0, 0.0], nu, nu_t);
        assert_eq!(p[0], s);
        assert!((p[1] - nu_t * s).abs() < 1e-15);
        // inner = max(0, ν s) = 0.6, outer = max(0.6, ν̃ s ≈ 0.857)
        assert!((p[2] - nu_t * s).abs() < 1e-15);

        let (p, _) = wu_positive([-0.1, -0.2, -0.5], nu, nu_t);
        assert_eq!(p, [0.0; 3]);
        let (p, _) = wu_positive([0.0; 3], nu, nu_t);
        assert_eq!(p, [0.0; 3]);
    }

    #[test]
    fn wu_all_compressive_is_undegraded() {
        let m = mat();
        let eps = SymTensor3::new(-1e-3, -2e-3, -1.5e-3, 1e-4, 0.0, -2e-4);
        let out = wu(&eps, 0.8, &m);
        assert!((out.sigma - sigma0(&eps, &m)).norm() < 1e-9 * sigma0(&eps, &m).norm());
        assert_eq!(out.dpsi_dd, Some(0.0));
    }
}
