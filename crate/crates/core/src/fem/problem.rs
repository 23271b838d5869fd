//! Element kernels, assembly and the two subproblem solvers.

use rayon::prelude::*;

use super::bc::{DisplacementBc, DofSystem, PhaseDirichlet};
use super::mesh::{ElementGeom, Mesh};
use super::sparse::SparseSystem;
use super::FemError;
use crate::constitutive::tables::ShearFitTable;
use crate::constitutive::{evaluate_with, ConstitutiveOutput, MaterialParams, ModelKind, PhasePoint};
use crate::tensor::{SymTensor3, Vec3};

/// In-plane Voigt slots of the 3D stress and tangent.
const PLANE: [usize; 3] = [0, 1, 5];

/// Elements whose mean d exceeds this carry no stiffness for the floating-subdomain check.

/// A mesh with model, material and boundary data, plus the cached sparse systems.
pub struct Problem {
    pub mesh: Mesh,
    pub model: ModelKind,
    pub material: MaterialParams,
    pub bcs: Vec<DisplacementBc>,
    pub crack: Option<PhaseDirichlet>,
    table: ShearFitTable,
    geom: Vec<ElementGeom>,
    normals: Vec<Option<Vec3>>,
    crack_nodes: Vec<bool>,
    u_sys: SparseSystem,
    d_sys: SparseSystem,
    /// Elements whose last assembled stiffness is not identically zero.
    live: Vec<bool>,
}

/// Outcome of one subproblem solve.
#[derive(Debug, Clone)]
pub(crate) struct SubSolve {
    pub energy: f64,
    pub iterations: usize,
    /// Internal force vector at the returned u (displacement solves only).
    pub internal: Vec<f64>,
}

struct ElementU {
    psi_a: f64,
    f: [f64; 6],
    k: [f64; 36],
}

struct ElementD {
    psi_a: f64,
    g: [f64; 3],
    /// Hessian with the elastic part projected onto PSD.
    h: [f64; 9],
    /// Unprojected Hessian, when it differs from `h`.
    exact: Option<[f64; 9]>,
}

impl Problem {
    pub fn new(
        mesh: Mesh,
        model: ModelKind,
        material: MaterialParams,
        bcs: Vec<DisplacementBc>,
        crack: Option<PhaseDirichlet>,
    ) -> Result<Self, FemError> {
        Self::with_table(mesh, model, material, bcs, crack, ShearFitTable::builtin().clone())
    }

    pub fn with_table(
        mesh: Mesh,
        model: ModelKind,
        material: MaterialParams,
        bcs: Vec<DisplacementBc>,
        crack: Option<PhaseDirichlet>,
        table: ShearFitTable,
    ) -> Result<Self, FemError> {
        mesh.validate()?;
        material.validate()?;
        if !model.is_variational() {
            return Err(FemError::UnsupportedModel(model));
        }
        for bc in &bcs {
            if mesh.set_nodes(&bc.set).is_none() {
                return Err(FemError::InvalidInput(format!("boundary set '{}' not in mesh", bc.set)));
            }
        }
        let mut crack_nodes = vec![false; mesh.n_nodes()];
        let mut normals = vec![None; mesh.n_elements()];
        if let Some(c) = &crack {
            let nodes = mesh
                .set_nodes(&c.set)
                .ok_or_else(|| FemError::InvalidInput(format!("crack set '{}' not in mesh", c.set)))?;
            for i in nodes {
                crack_nodes[i] = true;
            }
            if let Some(n) = c.normal {
                PhasePoint::with_normal(0.0, n).validate()?;
                for (e, t) in mesh.triangles.iter().enumerate() {
                    if t.iter().all(|&i| crack_nodes[i]) {
                        normals[e] = Some(n);
                    }
                }
            }
        }
        let geom = mesh.geometry();
        let u_dofs: Vec<Vec<usize>> =
            mesh.triangles.iter().map(|t| t.iter().flat_map(|&i| [2 * i, 2 * i + 1]).collect()).collect();
        let d_dofs: Vec<Vec<usize>> = mesh.triangles.iter().map(|t| t.to_vec()).collect();
        let u_sys = SparseSystem::new(2 * mesh.n_nodes(), &u_dofs);
        let d_sys = SparseSystem::new(mesh.n_nodes(), &d_dofs);
        let live = vec![true; mesh.n_elements()];
        Ok(Self { mesh, model, material, bcs, crack, table, geom, normals, crack_nodes, u_sys, d_sys, live })
    }

    pub fn geometry(&self) -> &[ElementGeom] {
        &self.geom
    }

    /// Nodes held at d = 1.
    pub fn crack_nodes(&self) -> &[bool] {
        &self.crack_nodes
    }

    pub fn strain(&self, e: usize, u: &[f64]) -> SymTensor3 {
        let g = &self.geom[e].grad;
        let t = &self.mesh.triangles[e];
        let (mut exx, mut eyy, mut gxy) = (0.0, 0.0, 0.0);
        for a in 0..3 {
            let (ux, uy) = (u[2 * t[a]], u[2 * t[a] + 1]);
            exx += g[a][0] * ux;
            eyy += g[a][1] * uy;
            gxy += g[a][1] * ux + g[a][0] * uy;
        }
        SymTensor3::plane(exx, eyy, 0.5 * gxy)
    }

    pub fn phase_point(&self, e: usize, d: &[f64]) -> PhasePoint {
        let t = &self.mesh.triangles[e];
        self.local_phase_point(e, [d[t[0]], d[t[1]], d[t[2]]])
    }

    fn local_phase_point(&self, e: usize, local: [f64; 3]) -> PhasePoint {
        let mean = ((local[0] + local[1] + local[2]) / 3.0).clamp(0.0, 1.0);
        match self.normals[e] {
            Some(n) => PhasePoint::with_normal(mean, n),
            None => {
                let g = self.geom[e].gradient(local);
                PhasePoint::new(mean, [g[0], g[1], 0.0])
            }
        }
    }

    pub fn evaluate(&self, e: usize, u: &[f64], d: &[f64]) -> Result<ConstitutiveOutput, FemError> {
        let eps = self.strain(e, u);
        let p = self.phase_point(e, d);
        Ok(evaluate_with(self.model, &eps, &p, &self.material, &self.table)?)
    }

    /// gc/2 ∫ (d²/ℓ + ℓ|∇d|²) with the consistent mass matrix.
    pub fn fracture_energy(&self, d: &[f64]) -> f64 {
        let mut total = 0.0;
        for e in 0..self.mesh.n_elements() {
            let (m, _) = self.fracture_block(e, d);
            let t = &self.mesh.triangles[e];
            let mut q = 0.0;
            for a in 0..3 {
                for b in 0..3 {
                    q += d[t[a]] * m[3 * a + b] * d[t[b]];
                }
            }
            total += 0.5 * q;
        }
        total
    }

    /// gc(M/ℓ + ℓL) for element e and the element's slice of d.
    fn fracture_block(&self, e: usize, d: &[f64]) -> ([f64; 9], [f64; 3]) {
        let g = &self.geom[e];
        let (gc, ell) = (self.material.gc, self.material.ell);
        let t = &self.mesh.triangles[e];
        let mut m = [0.0; 9];
        for a in 0..3 {
            for b in 0..3 {
                let mass = g.area / 12.0 * if a == b { 2.0 } else { 1.0 };
                let lap = g.area * (g.grad[a][0] * g.grad[b][0] + g.grad[a][1] * g.grad[b][1]);
                m[3 * a + b] = gc * (mass / ell + ell * lap);
            }
        }
        (m, [d[t[0]], d[t[1]], d[t[2]]])
    }

    /// ∫Ψ with one-point quadrature.
    pub fn elastic_energy(&self, u: &[f64], d: &[f64]) -> Result<f64, FemError> {
        let psi: Vec<f64> = (0..self.mesh.n_elements())
            .into_par_iter()
            .map(|e| self.evaluate(e, u, d).map(|o| o.psi.unwrap_or(0.0) * self.geom[e].area))
            .collect::<Result<_, _>>()?;
        Ok(psi.iter().sum())
    }

    /// Π(u, d) = ∫Ψ + fracture energy.
    pub fn energy(&self, u: &[f64], d: &[f64]) -> Result<f64, FemError> {
        Ok(self.elastic_energy(u, d)? + self.fracture_energy(d))
    }

    fn element_u(&self, e: usize, u: &[f64], d: &[f64], matrix: bool) -> Result<ElementU, FemError> {
        let out = self.evaluate(e, u, d)?;
        let g = &self.geom[e];
        let a = g.area;
        // B maps the 6 element dofs to (εxx, εyy, γxy).
        let mut bm = [[0.0; 6]; 3];
        for i in 0..3 {
            bm[0][2 * i] = g.grad[i][0];
            bm[1][2 * i + 1] = g.grad[i][1];
            bm[2][2 * i] = g.grad[i][1];
            bm[2][2 * i + 1] = g.grad[i][0];
        }
        let s = out.sigma.to_voigt();
        let s2 = PLANE.map(|i| s[i]);
        let mut f = [0.0; 6];
        for (j, fj) in f.iter_mut().enumerate() {
            *fj = a * (0..3).map(|r| bm[r][j] * s2[r]).sum::<f64>();
        }
        let mut k = [0.0; 36];
        if matrix {
            let c = &out.tangent;
            let mut cb = [[0.0; 6]; 3];
            for r in 0..3 {
                for j in 0..6 {
                    cb[r][j] = (0..3).map(|q| 0.5 * (c[(PLANE[r], PLANE[q])] + c[(PLANE[q], PLANE[r])]) * bm[q][j]).sum();
                }
            }
            for i in 0..6 {
                for j in 0..6 {
                    k[6 * i + j] = a * (0..3).map(|r| bm[r][i] * cb[r][j]).sum::<f64>();
                }
            }
        }
        Ok(ElementU { psi_a: out.psi.unwrap_or(0.0) * a, f, k })
    }

    /// Element stiffness Bᵀℂ B·A in the dof order (x0, y0, x1, y1, x2, y2).
    pub fn element_stiffness(&self, e: usize, u: &[f64], d: &[f64]) -> Result<[f64; 36], FemError> {
        Ok(self.element_u(e, u, d, true)?.k)
    }

    /// A·Ψ of element e and its gradient in the three nodal d values.
    fn local_psi(&self, e: usize, eps: &SymTensor3, local: [f64; 3]) -> Result<(ConstitutiveOutput, [f64; 3]), FemError> {
        let p = self.local_phase_point(e, local);
        let out = evaluate_with(self.model, eps, &p, &self.material, &self.table)?;
        let g = &self.geom[e];
        let dpsi = out.dpsi_dd.unwrap_or(0.0);
        let flux = out.dpsi_dgradd;
        let gv = std::array::from_fn(|i| g.area * (dpsi / 3.0 + flux[0] * g.grad[i][0] + flux[1] * g.grad[i][1]));
        Ok((out, gv))
    }

    fn element_d(&self, e: usize, u: &[f64], d: &[f64]) -> Result<ElementD, FemError> {
        let eps = self.strain(e, u);
        let (m, dl) = self.fracture_block(e, d);
        let (out, mut gv) = self.local_psi(e, &eps, dl)?;
        let a = self.geom[e].area;
        let mut hp = [0.0; 9];
        let mut raw = None;
        if self.model.affine_driving_force() || self.normals[e].is_some() {
            let d2psi = out.d2psi_dd2.unwrap_or(0.0).max(0.0);
            hp = [a * d2psi / 9.0; 9];
        } else {
            // Ψ also depends on ∇d through the normal and the regularization:
            // central differences of the gradient, projected onto PSD.
            const H: f64 = 1e-6;
            let mut fd = nalgebra::Matrix3::<f64>::zeros();
            for j in 0..3 {
                let (mut up, mut dn) = (dl, dl);
                up[j] += H;
                dn[j] -= H;
                let gp = self.local_psi(e, &eps, up)?.1;
                let gm = self.local_psi(e, &eps, dn)?.1;
                for i in 0..3 {
                    fd[(i, j)] = (gp[i] - gm[i]) / (2.0 * H);
                }
            }
            let sym = (fd + fd.transpose()) * 0.5;
            raw = Some(std::array::from_fn::<f64, 9, _>(|k| sym[(k / 3, k % 3)]));
            let eig = sym.symmetric_eigen();
            let clamped = eig.eigenvalues.map(|x| x.max(0.0));
            let psd = eig.eigenvectors * nalgebra::Matrix3::from_diagonal(&clamped) * eig.eigenvectors.transpose();
            for i in 0..3 {
                for j in 0..3 {
                    hp[3 * i + j] = psd[(i, j)];
                }
            }
        }
        let mut h = [0.0; 9];
        for i in 0..3 {
            for j in 0..3 {
                gv[i] += m[3 * i + j] * dl[j];
                h[3 * i + j] = m[3 * i + j] + hp[3 * i + j];
            }
        }
        let exact = raw.map(|r| std::array::from_fn(|k| m[k] + r[k]));
        Ok(ElementD { psi_a: out.psi.unwrap_or(0.0) * a, g: gv, h, exact })
    }

    /// Energy, internal force and (optionally) tangent, assembled into `u_sys`.
    fn assemble_u(&mut self, u: &[f64], d: &[f64], matrix: bool) -> Result<(f64, Vec<f64>), FemError> {
        let locals: Vec<ElementU> = (0..self.mesh.n_elements())
            .into_par_iter()
            .map(|e| self.element_u(e, u, d, matrix))
            .collect::<Result<_, _>>()?;
        let mut f = vec![0.0; 2 * self.mesh.n_nodes()];
        if matrix {
            self.u_sys.clear();
            let kmax = |k: &[f64; 36]| k.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let top = locals.iter().fold(0.0f64, |m, l| m.max(kmax(&l.k)));
            self.live = locals.iter().map(|l| kmax(&l.k) > 1e-14 * top).collect();
        }
        let mut psi = 0.0;
        for (e, loc) in locals.iter().enumerate() {
            psi += loc.psi_a;
            let t = &self.mesh.triangles[e];
            for a in 0..3 {
                f[2 * t[a]] += loc.f[2 * a];
                f[2 * t[a] + 1] += loc.f[2 * a + 1];
            }
            if matrix {
                self.u_sys.add_element(e, &loc.k);
            }
        }
        Ok((psi + self.fracture_energy(d), f))
    }

    /// Energy, gradient and Hessian of the d-subproblem, assembled into `d_sys`.
    /// Also returns the unprojected Hessian values when any element has one.
    fn assemble_d(&mut self, u: &[f64], d: &[f64]) -> Result<(f64, Vec<f64>, Option<Vec<f64>>), FemError> {
        let locals: Vec<ElementD> = (0..self.mesh.n_elements())
            .into_par_iter()
            .map(|e| self.element_d(e, u, d))
            .collect::<Result<_, _>>()?;
        let mut g = vec![0.0; self.mesh.n_nodes()];
        self.d_sys.clear();
        let mut psi = 0.0;
        for (e, loc) in locals.iter().enumerate() {
            psi += loc.psi_a;
            let t = &self.mesh.triangles[e];
            for a in 0..3 {
                g[t[a]] += loc.g[a];
            }
            self.d_sys.add_element(e, loc.exact.as_ref().unwrap_or(&loc.h));
        }
        let mut exact = None;
        if locals.iter().any(|l| l.exact.is_some()) {
            exact = Some(self.d_sys.values.clone());
            self.d_sys.clear();
            for (e, loc) in locals.iter().enumerate() {
                self.d_sys.add_element(e, &loc.h);
            }
        }
        Ok((psi + self.fracture_energy(d), g, exact))
    }

    /// Internal force vector f_int(u, d).
    pub fn internal_force(&mut self, u: &[f64], d: &[f64]) -> Result<Vec<f64>, FemError> {
        Ok(self.assemble_u(u, d, false)?.1)
    }

    /// Sum of internal forces over the nodes of each boundary condition's set.
    pub fn reactions(&self, internal: &[f64]) -> Vec<[f64; 2]> {
        self.bcs
            .iter()
            .map(|bc| {
                let nodes = self.mesh.set_nodes(&bc.set).unwrap_or_default();
                nodes.iter().fold([0.0, 0.0], |r, &i| [r[0] + internal[2 * i], r[1] + internal[2 * i + 1]])
            })
            .collect()
    }

    pub fn displacement_dofs(&self, t: f64) -> Result<DofSystem, FemError> {
        DofSystem::displacement(&self.mesh, &self.bcs, t)
    }

    /// A connected group of stiff elements without any constrained dof.
    fn floating(&self, system: &'static str, constrained: &[bool], per_node: usize) -> Option<FemError> {
        let comps = self.mesh.components(|e| self.live[e]);
        comps.into_iter().find(|c| !c.iter().any(|&i| (0..per_node).any(|k| constrained[per_node * i + k]))).map(|c| {
            let n = c.len() as f64;
            let (x, y) = c.iter().fold((0.0, 0.0), |s, &i| (s.0 + self.mesh.nodes[i][0] / n, s.1 + self.mesh.nodes[i][1] / n));
            FemError::FloatingSubdomain { system, nodes: c.len(), x, y }
        })
    }

    /// Minimizes Π over u with d fixed: Newton with backtracking on Π.
    /// Prescribed values must already be written into `u`.
    pub(crate) fn solve_u(
        &mut self,
        u: &mut [f64],
        d: &[f64],
        dofs: &DofSystem,
        max_iter: usize,
    ) -> Result<SubSolve, FemError> {
        let (mut energy, mut f) = self.assemble_u(u, d, true)?;
        let mut iterations = 0;
        while iterations < max_iter {
            let scale = f.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let mut r: Vec<f64> = f.iter().zip(&dofs.constrained).map(|(&x, &c)| if c { 0.0 } else { -x }).collect();
            let rnorm = r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if rnorm <= 1e-13 * scale || rnorm == 0.0 {
                break;
            }
            // a singular matrix can still factor when the load on the loose part is zero
            if let Some(e) = self.floating("displacement", &dofs.constrained, 2) {
                return Err(e);
            }
            self.u_sys.eliminate(&dofs.constrained);
            if self.u_sys.solve(&mut r).is_err() {
                return Err(FemError::Singular("displacement"));
            }
            iterations += 1;
            let slope: f64 = f.iter().zip(&r).map(|(a, b)| a * b).sum();
            let mut s = 1.0;
            let mut accepted = false;
            let mut trial = u.to_vec();
            for _ in 0..40 {
                for i in 0..u.len() {
                    trial[i] = u[i] + s * r[i];
                }
                let e_trial = self.energy(&trial, d)?;
                let roundoff = slope.abs() <= 1e-13 * energy.abs();
                if e_trial <= energy + 1e-4 * s * slope || (roundoff && s == 1.0) {
                    accepted = true;
                    break;
                }
                s *= 0.5;
            }
            if !accepted {
                break;
            }
            u.copy_from_slice(&trial);
            let (e_new, f_new) = self.assemble_u(u, d, true)?;
            energy = e_new;
            f = f_new;
        }
        Ok(SubSolve { energy, iterations, internal: f })
    }

    /// Minimizes Π over d with u fixed, subject to lower ≤ d ≤ 1 and d = 1 on
    /// crack nodes. Projected Newton with an active set and backtracking on Π.
    /// For models whose ∂Ψ/∂d is affine in d the subproblem is quadratic, and
    /// iterations after the first assembly use the exact quadratic model.
    pub(crate) fn solve_d(&mut self, u: &[f64], d: &mut [f64], lower: &[f64], max_iter: usize) -> Result<SubSolve, FemError> {
        let n = d.len();
        let lo: Vec<f64> = (0..n).map(|i| if self.crack_nodes[i] { 1.0 } else { lower[i].clamp(0.0, 1.0) }).collect();
        for i in 0..n {
            d[i] = d[i].clamp(lo[i], 1.0);
        }
        let quadratic = self.model.affine_driving_force();
        let (mut energy, mut g, mut exact) = self.assemble_d(u, d)?;
        let h0 = self.d_sys.values.clone();
        let d0 = d.to_vec();
        let e0 = energy;
        let g0 = g.clone();
        let model_energy = |sys: &SparseSystem, x: &[f64]| -> f64 {
            let dx: Vec<f64> = x.iter().zip(&d0).map(|(a, b)| a - b).collect();
            let hdx = sys.mul_with(&h0, &dx);
            e0 + dx.iter().zip(&g0).map(|(a, b)| a * b).sum::<f64>()
                + 0.5 * dx.iter().zip(&hdx).map(|(a, b)| a * b).sum::<f64>()
        };
        let mut iterations = 0;
        while iterations < max_iter {
            let active: Vec<bool> = (0..n)
                .map(|i| self.crack_nodes[i] || (d[i] <= lo[i] && g[i] > 0.0) || (d[i] >= 1.0 && g[i] < 0.0))
                .collect();
            let mut step: Vec<f64> = (0..n).map(|i| if active[i] { 0.0 } else { -g[i] }).collect();
            if step.iter().all(|x| x.abs() == 0.0) {
                break;
            }
            if quadratic {
                self.d_sys.values.copy_from_slice(&h0);
            }
            let mut solved = false;
            if let Some(ex) = &exact {
                // Newton on the unprojected Hessian when it is positive definite
                let psd = std::mem::replace(&mut self.d_sys.values, ex.clone());
                self.d_sys.eliminate(&active);
                let mut trial = step.clone();
                if self.d_sys.solve_spd(&mut trial) && trial.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>() < 0.0 {
                    step = trial;
                    solved = true;
                }
                self.d_sys.values = psd;
            }
            if !solved {
                self.d_sys.eliminate(&active);
                if self.d_sys.solve(&mut step).is_err() {
                    return Err(FemError::Singular("phase-field"));
                }
            }
            iterations += 1;
            let mut s = 1.0;
            let mut trial = d.to_vec();
            let mut accepted = None;
            for _ in 0..40 {
                for i in 0..n {
                    trial[i] = (d[i] + s * step[i]).clamp(lo[i], 1.0);
                }
                let slope: f64 = (0..n).map(|i| g[i] * (trial[i] - d[i])).sum();
                let e_trial = if quadratic { model_energy(&self.d_sys, &trial) } else { self.energy(u, &trial)? };
                let roundoff = slope.abs() <= 1e-13 * energy.abs();
                if e_trial <= energy + 1e-4 * slope || (roundoff && s == 1.0) {
                    accepted = Some(e_trial);
                    break;
                }
                s *= 0.5;
            }
            let Some(e_new) = accepted else { break };
            let change = (0..n).fold(0.0f64, |m, i| m.max((trial[i] - d[i]).abs()));
            d.copy_from_slice(&trial);
            energy = e_new;
            if quadratic {
                let dx: Vec<f64> = d.iter().zip(&d0).map(|(a, b)| a - b).collect();
                let hdx = self.d_sys.mul_with(&h0, &dx);
                g = (0..n).map(|i| g0[i] + hdx[i]).collect();
            } else {
                let (e_full, g_full, ex) = self.assemble_d(u, d)?;
                energy = e_full;
                g = g_full;
                exact = ex;
            }
            if change < 1e-12 {
                break;
            }
        }
        if quadratic {
            energy = self.energy(u, d)?;
        }
        Ok(SubSolve { energy, iterations, internal: Vec::new() })
    }
}
