mod common;

use common::{apply, random_rotation, random_strain, random_unit, rel, rng, sweep_material};
use crackfield::constitutive::check::{flux_consistency, phase_derivative_consistency, stress_consistency, tangent_consistency};
use crackfield::constitutive::{
    driving_force, evaluate, psi0, sigma0, ConstitutiveError, MaterialParams, ModelKind, PhasePoint, ShearFitTable,
};
use crackfield::tensor::SymTensor3;
use rand::Rng;

const E2: [f64; 3] = [0.0, 1.0, 0.0];

/// Crack-aligned energy with the normal along x2, written out component by component.
fn psi_aligned(eps: &SymTensor3, d: f64, m: &MaterialParams) -> f64 {
    let (l, mu) = (m.lambda, m.mu);
    let pm = l + 2.0 * mu;
    let [e11, e22, e33, e23, e13, e12] = eps.c;
    let g = (1.0 - d).powi(2) + m.k_residual;
    let (a, b) = ShearFitTable::builtin().coefficients(m.nu()).unwrap();
    let x = 1.0 - d;
    let gs = 1.0 + ((1.0 - d).powi(2) - 1.0) * (a * x * x + b * x + 1.0);
    let beta = l * e11 + pm * e22 + l * e33;
    let psi_t = (g * beta * beta + 4.0 * mu * (l + mu) * (e11 * e11 + e33 * e33) + 4.0 * l * mu * e11 * e33) / (2.0 * pm);
    let tr = e11 + e22 + e33;
    let psi_c = 0.5 * (l * tr * tr + 2.0 * mu * (e11 * e11 + e22 * e22 + e33 * e33));
    let psi_s = gs * 2.0 * mu * (e23 * e23 + e12 * e12) + 2.0 * mu * e13 * e13;
    if beta > 0.0 { psi_t + psi_s } else { psi_c + psi_s }
}

fn any_phase(model: ModelKind, d: f64, r: &mut rand::rngs::StdRng) -> PhasePoint {
    match model {
        ModelKind::Ss1 | ModelKind::Ss2 | ModelKind::Proposed if r.random_bool(0.5) => {
            PhasePoint::with_normal(d, random_unit(r))
        }
        _ => PhasePoint::new(d, random_unit(r).map(|x| x * 0.5)),
    }
}

#[test]
fn pristine_limit_recovers_isotropic_energy() {
    let m = sweep_material();
    let mut r = rng(1);
    for model in ModelKind::ALL {
        for _ in 0..1000 {
            let eps = random_strain(&mut r, 1e-3);
            let p = any_phase(model, 0.0, &mut r);
            let out = evaluate(model, &eps, &p, &m).unwrap();
            match out.psi {
                Some(psi) => assert!(rel(psi, psi0(&eps, &m)) < 1e-12, "{model}"),
                None => assert!((out.sigma - sigma0(&eps, &m)).norm() <= 1e-12 * sigma0(&eps, &m).norm()),
            }
        }
    }
}

#[test]
fn zero_strain_gives_zero_response() {
    let m = sweep_material();
    for model in ModelKind::ALL {
        let out = evaluate(model, &SymTensor3::ZERO, &PhasePoint::new(0.5, [0.0, 0.3, 0.0]), &m).unwrap();
        assert_eq!(out.sigma, SymTensor3::ZERO);
        assert!(out.psi.unwrap_or(0.0) == 0.0);
        if model.is_variational() {
            let (f, flux) = driving_force(model, &SymTensor3::ZERO, &PhasePoint::new(0.5, [0.0, 0.3, 0.0]), &m).unwrap();
            assert_eq!((f, flux), (0.0, [0.0; 3]));
        }
    }
}

#[test]
fn energy_nonnegative_and_degradation_monotone() {
    let m = sweep_material();
    let mut r = rng(2);
    for model in ModelKind::ALL.into_iter().filter(|m| m.is_variational()) {
        for _ in 0..10_000 {
            let eps = random_strain(&mut r, 1e-3);
            let p = any_phase(model, r.random_range(0.0..=1.0), &mut r);
            let out = evaluate(model, &eps, &p, &m).unwrap();
            assert!(out.psi.unwrap() >= -1e-18, "{model}: psi = {:?}", out.psi);
            assert!(out.dpsi_dd.unwrap() <= 1e-18, "{model}: dpsi/dd = {:?}", out.dpsi_dd);
        }
    }
}

#[test]
fn nonvariational_models_have_no_driving_force() {
    let m = sweep_material();
    for model in [ModelKind::Ss1, ModelKind::Ss2] {
        let err = driving_force(model, &SymTensor3::plane(1e-3, 0.0, 0.0), &PhasePoint::with_normal(0.2, E2), &m);
        assert!(matches!(err, Err(ConstitutiveError::UnsupportedModel(_))));
    }
}

#[test]
fn isotropic_driving_force() {
    let m = sweep_material();
    let eps = SymTensor3::new(1e-3, -2e-4, 3e-4, 1e-4, 2e-4, -5e-4);
    let d = 0.3;
    let (f, flux) = driving_force(ModelKind::Isotropic, &eps, &PhasePoint::new(d, [0.0; 3]), &m).unwrap();
    assert!(rel(f, -2.0 * (1.0 - d) * psi0(&eps, &m)) < 1e-14);
    assert_eq!(flux, [0.0; 3]);
}

#[test]
fn out_of_plane_shear_is_never_degraded() {
    let m = sweep_material();
    let mut r = rng(3);
    for _ in 0..1000 {
        let d = r.random_range(0.0..=1.0);
        let e13 = r.random_range(-1e-3..1e-3);
        let eps = SymTensor3::new(0.0, 0.0, 0.0, 0.0, e13, 0.0);
        let p = PhasePoint::with_normal(d, E2);
        let out = evaluate(ModelKind::Proposed, &eps, &p, &m).unwrap();
        assert!(rel(out.psi.unwrap(), 2.0 * m.mu * e13 * e13) < 1e-12);
        let (f, flux) = driving_force(ModelKind::Proposed, &eps, &p, &m).unwrap();
        assert_eq!(f, 0.0);
        assert_eq!(flux, [0.0; 3]);
    }
}

#[test]
fn aligned_and_invariant_forms_agree() {
    let mut r = rng(4);
    for m in [sweep_material(), { let mut m = MaterialParams::new(121150.0, 80770.0, 2.7, 40.0); m.k_residual = 1e-6; m }] {
        for _ in 0..1000 {
            let eps = random_strain(&mut r, 1e-3);
            let d = r.random_range(0.0..=1.0);
            let out = evaluate(ModelKind::Proposed, &eps, &PhasePoint::with_normal(d, E2), &m).unwrap();
            assert!(rel(out.psi.unwrap(), psi_aligned(&eps, d, &m)) < 1e-12);
        }
    }
}

#[test]
fn proposed_is_frame_consistent() {
    let m = sweep_material();
    let mut r = rng(5);
    for _ in 0..100 {
        let eps = random_strain(&mut r, 1e-3);
        let n = random_unit(&mut r);
        let q = random_rotation(&mut r);
        let d = r.random_range(0.0..=1.0);
        let a = evaluate(ModelKind::Proposed, &eps, &PhasePoint::with_normal(d, n), &m).unwrap();
        let b = evaluate(ModelKind::Proposed, &eps.rotate(&q), &PhasePoint::with_normal(d, apply(&q, &n)), &m).unwrap();
        assert!(rel(a.psi.unwrap(), b.psi.unwrap()) < 1e-12);
        assert!((a.sigma.rotate(&q) - b.sigma).norm() <= 1e-12 * a.sigma.norm());
    }
}

#[test]
fn proposed_energy_continuous_across_branch_switch() {
    let m = sweep_material();
    let (l, pm) = (m.lambda, m.p_modulus());
    // β = λε11 + (λ+2μ)ε22 + λε33 passes through zero as s crosses s0.
    let base = SymTensor3::new(2e-4, 0.0, -1e-4, 3e-5, 5e-5, 4e-5);
    let s0 = -(l * base.c[0] + l * base.c[2]) / pm;
    for d in [0.0, 0.5, 1.0] {
        let at = |s: f64| {
            let mut e = base;
            e.c[1] = s;
            evaluate(ModelKind::Proposed, &e, &PhasePoint::with_normal(d, E2), &m).unwrap().psi.unwrap()
        };
        for h in [1e-6, 1e-8, 1e-10] {
            assert!((at(s0 + h) - at(s0 - h)).abs() < 1e3 * h * m.mu * 1e-3);
        }
    }
}

#[test]
fn through_crack_shear_response_at_full_damage() {
    let m = sweep_material();
    let gam = 1e-3;
    let eps = SymTensor3::plane(0.0, 0.0, gam);
    let p = PhasePoint::with_normal(1.0, E2);
    let nu_t = m.lambda / m.p_modulus();
    for model in ModelKind::ALL {
        let s12 = evaluate(model, &eps, &p, &m).unwrap().sigma.c[5];
        let want = match model {
            ModelKind::Spectral => m.mu * gam,
            ModelKind::Wu => (1.0 + nu_t) * m.mu * gam,
            _ => 0.0,
        };
        assert!((s12 - want).abs() < 1e-12 * m.mu * gam, "{model}: {s12} vs {want}");
    }
}

fn fd_strains(r: &mut rand::rngs::StdRng, n: usize) -> Vec<SymTensor3> {
    (0..n)
        .map(|i| {
            let mut e = random_strain(r, 1e-3);
            // Alternate volumetric bias so both tension and compression branches are hit.
            let bias = if i % 2 == 0 { 1e-3 } else { -1e-3 } * r.random_range(0.0..1.0);
            for k in 0..3 {
                e.c[k] += bias;
            }
            e
        })
        .collect()
}

#[test]
fn stress_is_energy_gradient() {
    let m = sweep_material();
    let mut r = rng(6);
    for model in [ModelKind::Isotropic, ModelKind::VolDev, ModelKind::Spectral, ModelKind::Wu, ModelKind::Sk, ModelKind::Proposed] {
        let mut interior = 0;
        for eps in fd_strains(&mut r, 200) {
            let p = any_phase(model, r.random_range(0.0..=1.0), &mut r);
            let rep = stress_consistency(model, &eps, &p, &m).unwrap();
            if rep.interior {
                interior += 1;
                assert!(rep.rel_error < 1e-6, "{model}: {}", rep.rel_error);
            }
        }
        assert!(interior >= 180, "{model}: only {interior} interior points");
    }
}

#[test]
fn tangent_is_stress_jacobian() {
    let m = sweep_material();
    let mut r = rng(7);
    for model in ModelKind::ALL {
        let mut interior = 0;
        for eps in fd_strains(&mut r, 200) {
            let p = any_phase(model, r.random_range(0.0..=1.0), &mut r);
            let rep = tangent_consistency(model, &eps, &p, &m).unwrap();
            if rep.interior {
                interior += 1;
                assert!(rep.rel_error < 1e-5, "{model}: {}", rep.rel_error);
            }
        }
        assert!(interior >= 180, "{model}: only {interior} interior points");
    }
}

#[test]
fn phase_derivatives_match_differences() {
    let m = sweep_material();
    let mut r = rng(8);
    for model in ModelKind::ALL.into_iter().filter(|m| m.is_variational()) {
        for eps in fd_strains(&mut r, 100) {
            let p = any_phase(model, r.random_range(0.01..0.99), &mut r);
            let e = phase_derivative_consistency(model, &eps, &p, &m).unwrap();
            assert!(e < 1e-6, "{model}: {e}");
        }
    }
}

#[test]
fn proposed_flux_is_gradient_derivative() {
    let mut m = sweep_material();
    m.alpha_reg = 0.5;
    let mut r = rng(9);
    let mut checked = 0;
    for eps in fd_strains(&mut r, 200) {
        let g = random_unit(&mut r).map(|x| x * r.random_range(0.3..3.0));
        let p = PhasePoint::new(r.random_range(0.0..=1.0), g);
        // Skip points where the perturbation crosses β = 0.
        let out = evaluate(ModelKind::Proposed, &eps, &p, &m).unwrap();
        let n = p.normal().unwrap();
        let f = (m.alpha_reg * m.ell * m.ell * crackfield::tensor::norm3(&g).powi(2)).tanh();
        let i4 = crackfield::tensor::dot3(&n, &eps.dot(&n));
        let beta = m.lambda * eps.trace() + 2.0 * m.mu * f * i4;
        if beta.abs() < 1e-4 * m.mu * 1e-3 {
            continue;
        }
        let e = flux_consistency(ModelKind::Proposed, &eps, &p, &m).unwrap();
        assert!(e < 1e-5, "flux error {e}, psi {:?}", out.psi);
        checked += 1;
    }
    assert!(checked > 150);
}

#[test]
fn regularization_limits() {
    use crackfield::constitutive::regularize;
    assert_eq!(regularize(0.3, 0.2, &[0.0; 3], 40.0, 5.66e-4), (0.0, 0.0));
    let ell = 3.125;
    let (a, b) = regularize(0.3, 0.2, &[0.0, 1e3 / ell, 0.0], ell, 5.66e-4);
    assert_eq!((a, b), (0.3, 0.2));
}

#[test]
fn proposed_rejects_poisson_ratio_outside_fit() {
    let m = MaterialParams::new(1.0, 10.0, 1.0, 1.0);
    let out = evaluate(ModelKind::Proposed, &SymTensor3::plane(1e-3, 0.0, 0.0), &PhasePoint::new(0.1, [0.0; 3]), &m);
    assert!(matches!(out, Err(ConstitutiveError::OutOfRange { .. })));
}

#[test]
fn invalid_inputs_are_rejected() {
    let m = sweep_material();
    let eps = SymTensor3::plane(1e-3, 0.0, 0.0);
    assert!(evaluate(ModelKind::Isotropic, &eps, &PhasePoint::new(1.2, [0.0; 3]), &m).is_err());
    assert!(evaluate(ModelKind::Isotropic, &SymTensor3::plane(f64::NAN, 0.0, 0.0), &PhasePoint::new(0.2, [0.0; 3]), &m).is_err());
    let mut bad = m;
    bad.mu = -1.0;
    assert!(evaluate(ModelKind::Isotropic, &eps, &PhasePoint::new(0.2, [0.0; 3]), &bad).is_err());
}

#[test]
fn tangents_symmetric_within_branches() {
    let m = sweep_material();
    let mut r = rng(10);
    for model in [ModelKind::Isotropic, ModelKind::VolDev, ModelKind::Spectral, ModelKind::Wu, ModelKind::Sk, ModelKind::Proposed] {
        for eps in fd_strains(&mut r, 200) {
            let p = any_phase(model, r.random_range(0.0..=1.0), &mut r);
            let t = evaluate(model, &eps, &p, &m).unwrap().tangent;
            let asym = (t - t.transpose()).abs().max();
            assert!(asym <= 1e-8 * t.abs().max(), "{model}: {asym}");
        }
    }
}
