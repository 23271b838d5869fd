#![allow(dead_code)]

use crackfield::constitutive::MaterialParams;
use crackfield::tensor::{SymTensor3, Vec3};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_strain(r: &mut StdRng, scale: f64) -> SymTensor3 {
    SymTensor3 { c: std::array::from_fn(|_| scale * r.random_range(-1.0..1.0)) }
}

pub fn random_unit(r: &mut StdRng) -> Vec3 {
    loop {
        let v: Vec3 = std::array::from_fn(|_| r.random_range(-1.0..1.0));
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.1 && n <= 1.0 {
            return v.map(|x| x / n);
        }
    }
}

/// Rotation matrix from a uniformly random unit quaternion.
pub fn random_rotation(r: &mut StdRng) -> [[f64; 3]; 3] {
    let q: [f64; 4] = loop {
        let q: [f64; 4] = std::array::from_fn(|_| r.random_range(-1.0..1.0));
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.1 && n <= 1.0 {
            break q.map(|x| x / n);
        }
    };
    let [w, x, y, z] = q;
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

pub fn apply(q: &[[f64; 3]; 3], v: &Vec3) -> Vec3 {
    std::array::from_fn(|i| (0..3).map(|j| q[i][j] * v[j]).sum())
}

/// Sweep material (λ = 1.1538, μ = 0.76923 in GPa, as MPa), no residual.
pub fn sweep_material() -> MaterialParams {
    let mut m = MaterialParams::new(1153.8, 769.23, 1.0, 1.0);
    m.k_residual = 0.0;
    m
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}
