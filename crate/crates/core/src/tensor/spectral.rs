//! Derivatives of isotropic tensor functions that share axes with ε.
//!
//! A response σ = Σ σ_a(ε₁, ε₂, ε₃) E_a⊗E_a has the tangent
//! dσ = Σ_ab J_ab dε_bb E_a⊗E_a + Σ_{a≠b} (σ_a − σ_b)/(ε_a − ε_b) dε_ab E_a⊗E_b,
//! with dε_ab = E_a·dε E_b. Near coalescence the quotient is replaced by its
//! limit ½(J_aa − J_ab + J_bb − J_ba), exact inside a piecewise-linear branch.

use super::{unit_eng_strain, EigenSystem, SymTensor3, Tangent6};

/// Principal stresses and their Jacobian ∂σ_a/∂ε_b.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipalResponse {
    pub stress: [f64; 3],
    pub jacobian: [[f64; 3]; 3],
}

/// Relative principal-strain gap below which the limit form is used.
const COALESCE_TOL: f64 = 1e-8;

/// Voigt tangent of a coaxial response evaluated at `eig`.
pub fn coaxial_tangent(eig: &EigenSystem, resp: &PrincipalResponse) -> Tangent6 {
    let ev = &eig.values;
    let scale = ev.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let j = &resp.jacobian;
    let mut shear = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            if a == b {
                continue;
            }
            let gap = ev[a] - ev[b];
            shear[a][b] = if gap.abs() > COALESCE_TOL * scale && gap != 0.0 {
                (resp.stress[a] - resp.stress[b]) / gap
            } else {
                0.5 * (j[a][a] - j[a][b] + j[b][b] - j[b][a])
            };
        }
    }
    let dyads: [[SymTensor3; 3]; 3] =
        std::array::from_fn(|a| std::array::from_fn(|b| SymTensor3::sym_outer(&eig.vectors[a], &eig.vectors[b])));

    let mut t = Tangent6::zeros();
    for col in 0..6 {
        let de = unit_eng_strain(col);
        let mut p = [[0.0; 3]; 3];
        for (a, row) in p.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate() {
                *v = eig.project(&de, a, b);
            }
        }
        let mut ds = SymTensor3::ZERO;
        for a in 0..3 {
            let diag: f64 = (0..3).map(|b| j[a][b] * p[b][b]).sum();
            ds = ds + diag * dyads[a][a];
            for b in (a + 1)..3 {
                // Both orderings (a,b) and (b,a) combine into one symmetric dyad.
                let c = 0.5 * (shear[a][b] + shear[b][a]);
                ds = ds + (2.0 * c * p[a][b]) * dyads[a][b];
            }
        }
        for i in 0..6 {
            t[(i, col)] = ds.c[i];
        }
    }
    t
}
