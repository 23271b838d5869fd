//! Eigendecomposition of symmetric 3×3 tensors.
//!
//! Tensors with t13 = t23 = 0 take a closed-form 2×2 path; everything else
//! goes through cyclic Jacobi rotations.

use super::{SymTensor3, TensorError, Vec3};

/// Principal values (descending) and matching orthonormal axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSystem {
    pub values: [f64; 3],
    /// `vectors[a]` is the axis of `values[a]`.
    pub vectors: [Vec3; 3],
}

impl EigenSystem {
    /// Σ λ_a E_a⊗E_a.
    pub fn reconstruct(&self) -> SymTensor3 {
        let mut t = SymTensor3::ZERO;
        for a in 0..3 {
            t = t + self.values[a] * SymTensor3::outer(&self.vectors[a]);
        }
        t
    }

    /// Component E_a·T·E_b of a tensor in this basis.
    pub fn project(&self, t: &SymTensor3, a: usize, b: usize) -> f64 {
        super::dot3(&self.vectors[a], &t.dot(&self.vectors[b]))
    }
}

pub fn eig_decompose(t: &SymTensor3) -> Result<EigenSystem, TensorError> {
    if !t.is_finite() {
        return Err(TensorError::InvalidInput("non-finite tensor".into()));
    }
    Ok(eig_unchecked(t))
}

pub(crate) fn eig_unchecked(t: &SymTensor3) -> EigenSystem {
    let (values, vectors) = if t.c[3] == 0.0 && t.c[4] == 0.0 {
        plane_eig(t)
    } else {
        jacobi(t)
    };
    sort_descending(values, vectors)
}

fn plane_eig(t: &SymTensor3) -> ([f64; 3], [Vec3; 3]) {
    let (a, b, c) = (t.c[0], t.c[1], t.c[5]);
    let m = 0.5 * (a + b);
    let r = (0.5 * (a - b)).hypot(c);
    let th = 0.5 * (2.0 * c).atan2(a - b);
    let (s, co) = th.sin_cos();
    (
        [m + r, m - r, t.c[2]],
        [[co, s, 0.0], [-s, co, 0.0], [0.0, 0.0, 1.0]],
    )
}

fn jacobi(t: &SymTensor3) -> ([f64; 3], [Vec3; 3]) {
    let mut a = t.to_matrix();
    // Columns of v are the eigenvectors.
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let scale = t.norm();
    for _sweep in 0..64 {
        let off = a[0][1].abs() + a[0][2].abs() + a[1][2].abs();
        if off <= f64::EPSILON * 1e-3 * scale || off == 0.0 {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let apq = a[p][q];
            if apq == 0.0 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
            let tt = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let tt = if theta == 0.0 { 1.0 } else { tt };
            let c = 1.0 / (tt * tt + 1.0).sqrt();
            let s = tt * c;
            for k in 0..3 {
                let akp = a[k][p];
                let akq = a[k][q];
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let apk = a[p][k];
                let aqk = a[q][k];
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            for row in v.iter_mut() {
                let vp = row[p];
                let vq = row[q];
                row[p] = c * vp - s * vq;
                row[q] = s * vp + c * vq;
            }
        }
    }
    let vecs = [
        [v[0][0], v[1][0], v[2][0]],
        [v[0][1], v[1][1], v[2][1]],
        [v[0][2], v[1][2], v[2][2]],
    ];
    ([a[0][0], a[1][1], a[2][2]], vecs)
}

fn sort_descending(values: [f64; 3], vectors: [Vec3; 3]) -> EigenSystem {
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    EigenSystem {
        values: idx.map(|i| values[i]),
        vectors: idx.map(|i| vectors[i]),
    }
}
