//! Small dense symmetric real matrices.
//!
//! Everything in the design loop lives at desk scale (n well under a few
//! hundred), so plain row-major storage and textbook O(n^3) products are the
//! right tool; no external linear algebra is pulled in.

use alloc::vec;
use alloc::vec::Vec;

use crate::graph::NodeSet;
use crate::spectra::SpectraError;

/// Dense symmetric matrix, row-major. Constructed symmetric and never
/// perturbed asymmetrically.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl DenseSymMatrix {
    pub fn zeros(dim: usize) -> Self {
        DenseSymMatrix { dim, data: vec![0.0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    /// Builds from an entry function, forcing symmetry by evaluating only
    /// the lower triangle.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..=i {
                let v = f(i, j);
                m.data[i * dim + j] = v;
                m.data[j * dim + i] = v;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set_sym(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.dim + j] = value;
        self.data[j * self.dim + i] = value;
    }

    /// Adds `value` to both `(i, j)` and `(j, i)` (once when `i == j`).
    pub fn add_sym(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.dim + j] += value;
        if i != j {
            self.data[j * self.dim + i] += value;
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        crate::num::sqrt(self.data.iter().map(|x| x * x).sum())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Matrix product. Powers of a symmetric matrix commute, so the result
    /// stays symmetric up to roundoff for every use in this crate.
    pub fn mul(&self, other: &DenseSymMatrix) -> DenseSymMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch in matrix product");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// Traces of `M^1 .. M^kmax`, by repeated multiplication so every
    /// intermediate power's trace is collected in one pass.
    pub fn power_traces(&self, kmax: usize) -> Vec<f64> {
        let mut traces = Vec::with_capacity(kmax);
        if kmax == 0 {
            return traces;
        }
        let mut p = self.clone();
        traces.push(p.trace());
        for _ in 1..kmax {
            p = self.mul(&p);
            traces.push(p.trace());
        }
        traces
    }

    /// Submatrix with rows and columns selected in `s`'s order, so the
    /// set's anchor occupies row and column 0.
    pub fn principal_submatrix(&self, s: &NodeSet) -> Result<DenseSymMatrix, SpectraError> {
        for v in s.iter() {
            if v.index() >= self.dim {
                return Err(SpectraError::IndexOutOfRange { index: v.index(), dim: self.dim });
            }
        }
        let k = s.len();
        let mut out = Self::zeros(k);
        for (p, v) in s.iter().enumerate() {
            for (q, w) in s.iter().enumerate() {
                out.data[p * k + q] = self.get(v.index(), w.index());
            }
        }
        Ok(out)
    }
}
