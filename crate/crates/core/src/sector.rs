//! Charge sectors of the computational basis.
//!
//! When every jump operator shifts a charge Q(b) = Σ_j c_j b_j (c_j = ±1)
//! by the same amount, the generator never couples density-matrix entries
//! with Q(r) − Q(c) = 0 to the rest. States that start in that block stay
//! there, which lets the integrator skip most of the matrix.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::ops::{LadderSum, ZERO};

#[derive(Debug, Clone, PartialEq)]
pub struct Sectors {
    charge: Vec<i32>,
    offset: i32,
    members: Vec<Vec<usize>>,
}

impl Sectors {
    pub fn from_site_charges(site_charge: &[i32]) -> Sectors {
        let n = site_charge.len();
        let charge: Vec<i32> = (0..1usize << n)
            .map(|b| (0..n).filter(|j| b & (1 << j) != 0).map(|j| site_charge[j]).sum())
            .collect();
        let offset = n as i32;
        let mut members = vec![Vec::new(); 2 * n + 1];
        for (b, &q) in charge.iter().enumerate() {
            members[(q + offset) as usize].push(b);
        }
        Sectors {
            charge,
            offset,
            members,
        }
    }

    pub fn charge(&self, b: usize) -> i32 {
        self.charge[b]
    }

    /// Basis states of charge `q`.
    pub fn rows(&self, q: i32) -> &[usize] {
        let i = q + self.offset;
        if i < 0 || i as usize >= self.members.len() {
            &[]
        } else {
            &self.members[i as usize]
        }
    }

    /// True if `m` vanishes outside the charge-diagonal block.
    pub fn contains(&self, m: &DMatrix<C64>) -> bool {
        let dim = m.nrows();
        (0..dim).all(|c| (0..dim).all(|r| self.charge[r] == self.charge[c] || m[(r, c)] == ZERO))
    }

    /// Smallest eigenvalue of a Hermitian matrix in the charge-diagonal block.
    pub fn min_eigenvalue(&self, m: &DMatrix<C64>) -> f64 {
        self.members
            .iter()
            .filter(|idx| !idx.is_empty())
            .map(|idx| {
                let k = idx.len();
                let block = DMatrix::from_fn(k, k, |r, c| m[(idx[r], idx[c])]);
                block
                    .symmetric_eigenvalues()
                    .iter()
                    .copied()
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Row-compressed form of a [`LadderSum`].
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRows {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseRows {
    pub fn from_ladder(op: &LadderSum, n_atoms: usize) -> SparseRows {
        let m = op.to_matrix(n_atoms);
        let dim = m.nrows();
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for r in 0..dim {
            for c in 0..dim {
                if m[(r, c)] != ZERO {
                    cols.push(c);
                    vals.push(m[(r, c)]);
                }
            }
            row_ptr.push(cols.len());
        }
        SparseRows { row_ptr, cols, vals }
    }

    /// Σ_s A[r, s] x[s] over a column-major column slice.
    #[inline]
    pub fn row_dot(&self, r: usize, col: &[C64]) -> C64 {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        self.vals[a..b]
            .iter()
            .zip(&self.cols[a..b])
            .fold(ZERO, |acc, (v, &s)| acc + v * col[s])
    }

    /// Σ_s A[r, s] conj(X[c, s]) for column-major `X` of dimension `dim`.
    #[inline]
    pub fn row_dot_adjoint(&self, r: usize, x: &[C64], c: usize, dim: usize) -> C64 {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        self.vals[a..b]
            .iter()
            .zip(&self.cols[a..b])
            .fold(ZERO, |acc, (v, &s)| acc + v * x[c + s * dim].conj())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::ONE;

    #[test]
    fn excitation_sectors() {
        let s = Sectors::from_site_charges(&[1, 1, 1]);
        assert_eq!(s.rows(0), [0]);
        assert_eq!(s.rows(1), [1, 2, 4]);
        assert_eq!(s.rows(3), [7]);
        assert!(s.rows(4).is_empty());
        assert!(s.rows(-1).is_empty());
    }

    #[test]
    fn mixed_charges() {
        let s = Sectors::from_site_charges(&[1, -1]);
        assert_eq!(s.charge(3), 0);
        assert_eq!(s.rows(0), [0, 3]);
    }

    #[test]
    fn block_min_eigenvalue() {
        let s = Sectors::from_site_charges(&[1, 1]);
        let mut m = DMatrix::<C64>::zeros(4, 4);
        m[(1, 1)] = C64::new(0.5, 0.0);
        m[(2, 2)] = C64::new(0.5, 0.0);
        m[(1, 2)] = C64::new(0.7, 0.0);
        m[(2, 1)] = C64::new(0.7, 0.0);
        assert!(s.contains(&m));
        assert!((s.min_eigenvalue(&m) + 0.2).abs() < 1e-15);
        m[(0, 3)] = ONE;
        assert!(!s.contains(&m));
    }
}
