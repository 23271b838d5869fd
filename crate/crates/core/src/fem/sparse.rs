//! Fixed-pattern symmetric sparse systems with cached symbolic factorization.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Llt, Lu, SymbolicLlt, SymbolicLu};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMat};
use faer::{MatMut, Side};

/// Why a factorization failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveFailure {
    Singular,
}

/// CSC matrix with a pattern fixed at construction. Each element owns a block
/// of value slots, so assembly is a scatter through `slots`.
pub struct SparseSystem {
    n: usize,
    symbolic: SymbolicSparseColMat<usize>,
    row_idx: Vec<usize>,
    col_ptr: Vec<usize>,
    diag: Vec<usize>,
    /// Per element, the value index of each (local i, local j) pair, row-major.
    slots: Vec<Vec<usize>>,
    pub values: Vec<f64>,
    llt: Option<SymbolicLlt<usize>>,
    lu: Option<SymbolicLu<usize>>,
}

impl SparseSystem {
    /// Pattern from the element dof lists.
    pub fn new(n: usize, element_dofs: &[Vec<usize>]) -> Self {
        let mut cols: Vec<Vec<usize>> = vec![Vec::new(); n];
        for dofs in element_dofs {
            for &j in dofs {
                cols[j].extend_from_slice(dofs);
            }
        }
        for (j, c) in cols.iter_mut().enumerate() {
            c.push(j);
            c.sort_unstable();
            c.dedup();
        }
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut row_idx = Vec::new();
        col_ptr.push(0);
        for c in &cols {
            row_idx.extend_from_slice(c);
            col_ptr.push(row_idx.len());
        }
        let find = |i: usize, j: usize| col_ptr[j] + row_idx[col_ptr[j]..col_ptr[j + 1]].binary_search(&i).unwrap();
        let diag = (0..n).map(|j| find(j, j)).collect();
        let slots = element_dofs
            .iter()
            .map(|dofs| dofs.iter().flat_map(|&i| dofs.iter().map(move |&j| (i, j))).map(|(i, j)| find(i, j)).collect())
            .collect();
        let symbolic = SymbolicSparseColMat::new_checked(n, n, col_ptr.clone(), None, row_idx.clone());
        let nnz = row_idx.len();
        Self { n, symbolic, row_idx, col_ptr, diag, slots, values: vec![0.0; nnz], llt: None, lu: None }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn clear(&mut self) {
        self.values.fill(0.0);
    }

    /// Adds a dense element block (row-major, in the element's dof order).
    pub fn add_element(&mut self, e: usize, block: &[f64]) {
        for (&s, &v) in self.slots[e].iter().zip(block) {
            self.values[s] += v;
        }
    }

    /// Replaces rows and columns of fixed dofs by the identity.
    pub fn eliminate(&mut self, fixed: &[bool]) {
        for j in 0..self.n {
            for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                let i = self.row_idx[k];
                if fixed[i] || fixed[j] {
                    self.values[k] = if i == j { 1.0 } else { 0.0 };
                }
            }
        }
    }

    pub fn diagonal(&self, i: usize) -> f64 {
        self.values[self.diag[i]]
    }

    /// y = A x.
    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        self.mul_with(&self.values, x)
    }

    /// y = A x for another value array on the same pattern.
    pub fn mul_with(&self, values: &[f64], x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for j in 0..self.n {
            for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                y[self.row_idx[k]] += values[k] * x[j];
            }
        }
        y
    }

    /// Solves A x = b in place. Tries Cholesky first, then LU. The symbolic
    /// analyses are computed once and reused.
    /// Cholesky solve only. Leaves `b` unchanged and returns false when the
    /// matrix is not numerically positive definite.
    pub fn solve_spd(&mut self, b: &mut [f64]) -> bool {
        let mat = SparseColMatRef::new(self.symbolic.as_ref(), &self.values);
        if self.llt.is_none() {
            self.llt = SymbolicLlt::try_new(self.symbolic.as_ref(), Side::Lower).ok();
        }
        let rhs = b.to_vec();
        if let Some(sym) = &self.llt {
            if let Ok(f) = Llt::try_new_with_symbolic(sym.clone(), mat, Side::Lower) {
                f.solve_in_place(MatMut::from_column_major_slice_mut(b, self.n, 1));
                if b.iter().all(|x| x.is_finite()) {
                    return true;
                }
            }
        }
        b.copy_from_slice(&rhs);
        false
    }

    pub fn solve(&mut self, b: &mut [f64]) -> Result<(), SolveFailure> {
        if self.solve_spd(b) {
            return Ok(());
        }
        let rhs = b.to_vec();
        let mat = SparseColMatRef::new(self.symbolic.as_ref(), &self.values);
        if self.lu.is_none() {
            self.lu = SymbolicLu::try_new(self.symbolic.as_ref()).ok();
        }
        let sym = self.lu.clone().ok_or(SolveFailure::Singular)?;
        let f = Lu::try_new_with_symbolic(sym, mat).map_err(|_| SolveFailure::Singular)?;
        f.solve_in_place(MatMut::from_column_major_slice_mut(b, self.n, 1));
        let r = self.mul(b);
        let scale = rhs.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
        let res = r.iter().zip(&rhs).fold(0.0f64, |m, (a, c)| m.max((a - c).abs()));
        if b.iter().all(|x| x.is_finite()) && res <= 1e-6 * scale {
            Ok(())
        } else {
            Err(SolveFailure::Singular)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> SparseSystem {
        let elems: Vec<Vec<usize>> = (0..n - 1).map(|i| vec![i, i + 1]).collect();
        let mut s = SparseSystem::new(n, &elems);
        for e in 0..n - 1 {
            s.add_element(e, &[1.0, -1.0, -1.0, 1.0]);
        }
        s
    }

    #[test]
    fn fixed_end_chain_solves() {
        let n = 6;
        let mut s = chain(n);
        let mut fixed = vec![false; n];
        fixed[0] = true;
        s.eliminate(&fixed);
        let mut b = vec![0.0; n];
        b[n - 1] = 1.0;
        s.solve(&mut b).unwrap();
        for (i, x) in b.iter().enumerate() {
            assert!((x - i as f64).abs() < 1e-12);
        }
        // second solve reuses the symbolic analysis
        let mut b2 = vec![0.0; n];
        b2[n - 1] = 2.0;
        s.solve(&mut b2).unwrap();
        assert!((b2[n - 1] - 2.0 * (n - 1) as f64).abs() < 1e-12);
    }

    #[test]
    fn floating_chain_is_singular() {
        let n = 4;
        let mut s = chain(n);
        let mut b = vec![1.0, 0.0, 0.0, -1.0];
        assert_eq!(s.solve(&mut b), Err(SolveFailure::Singular));
    }

    #[test]
    fn indefinite_falls_back_to_lu() {
        let mut s = SparseSystem::new(2, &[vec![0, 1]]);
        s.add_element(0, &[1.0, 2.0, 2.0, 1.0]);
        let mut b = vec![3.0, 3.0];
        s.solve(&mut b).unwrap();
        assert!((b[0] - 1.0).abs() < 1e-12 && (b[1] - 1.0).abs() < 1e-12);
    }
}
