mod common;

use common::{apply, random_rotation, random_strain, random_unit, rng};
use crackfield::tensor::{eig_decompose, invariants, SymTensor3};
use proptest::prelude::*;

fn strain() -> impl Strategy<Value = SymTensor3> {
    prop::array::uniform6(-1.0f64..1.0).prop_map(|c| SymTensor3 { c })
}

proptest! {
    #[test]
    fn eigen_reconstructs_and_is_orthonormal(t in strain()) {
        let e = eig_decompose(&t).unwrap();
        prop_assert!((e.reconstruct() - t).norm() <= 1e-12 * t.norm().max(1e-300));
        for a in 0..3 {
            for b in 0..3 {
                let dot: f64 = (0..3).map(|i| e.vectors[a][i] * e.vectors[b][i]).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                prop_assert!((dot - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn identity_shift_moves_eigenvalues(t in strain(), delta in -2.0f64..2.0) {
        let e0 = eig_decompose(&t).unwrap();
        let e1 = eig_decompose(&(t + delta * SymTensor3::IDENTITY)).unwrap();
        for a in 0..3 {
            prop_assert!((e1.values[a] - e0.values[a] - delta).abs() < 1e-12);
        }
        let distinct = (e0.values[0] - e0.values[1]).min(e0.values[1] - e0.values[2]) > 1e-3;
        if distinct {
            for a in 0..3 {
                let dot: f64 = (0..3).map(|i| e0.vectors[a][i] * e1.vectors[a][i]).sum();
                prop_assert!((dot.abs() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn invariant_identities(t in strain(), v in prop::array::uniform3(-1.0f64..1.0)) {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        prop_assume!(norm > 1e-3);
        let n = v.map(|x| x / norm);
        let inv = invariants(&t, &n).unwrap();
        let tr2 = t.square().trace();
        prop_assert!((inv.i2 - 0.5 * (inv.i1 * inv.i1 - tr2)).abs() < 1e-12);
        prop_assert!(inv.i4 * inv.i4 <= inv.i5 + 1e-12);
        prop_assert!(t.dev().trace().abs() <= 1e-14 * t.norm().max(1.0));
    }
}

#[test]
fn invariants_are_frame_independent() {
    let mut r = rng(7);
    for _ in 0..100 {
        let eps = random_strain(&mut r, 1.0);
        let n = random_unit(&mut r);
        let q = random_rotation(&mut r);
        let a = invariants(&eps, &n).unwrap();
        let b = invariants(&eps.rotate(&q), &apply(&q, &n)).unwrap();
        for (x, y) in [(a.i1, b.i1), (a.i2, b.i2), (a.i4, b.i4), (a.i5, b.i5)] {
            assert!((x - y).abs() < 1e-12, "{x} vs {y}");
        }
    }
}
