//! Minimal row-compressed complex sparse matrices for master-equation kernels.
//!
//! The Dicke Hamiltonian and its jump operator have O(d) nonzeros, so the
//! right-hand side of the master equation is dominated by sparse·dense
//! products. Left products run over contiguous rows of the dense operand;
//! right products are obtained from left products via conjugate transposes
//! of Hermitian operands and are avoided in the hot path.

use crate::{C64, CMat};
use ndarray::Array2;

#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pub dim: usize,
    /// Row start offsets, length dim+1.
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<C64>,
}

impl CsrMatrix {
    pub fn from_dense(m: &CMat, drop_tol: f64) -> Self {
        let dim = m.nrows();
        assert_eq!(dim, m.ncols(), "CsrMatrix requires a square matrix");
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for i in 0..dim {
            for j in 0..dim {
                let z = m[[i, j]];
                if z.norm() > drop_tol {
                    cols.push(j);
                    vals.push(z);
                }
            }
            row_ptr.push(cols.len());
        }
        CsrMatrix { dim, row_ptr, cols, vals }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn to_dense(&self) -> CMat {
        let mut m = Array2::zeros((self.dim, self.dim));
        for i in 0..self.dim {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                m[[i, self.cols[k]]] = self.vals[k];
            }
        }
        m
    }

    /// out = self · x, with x dense and rows contiguous.
    pub fn mul_dense(&self, x: &CMat, out: &mut CMat) {
        let d = self.dim;
        debug_assert_eq!(x.nrows(), d);
        out.fill(C64::new(0.0, 0.0));
        let xs = x.as_slice().expect("dense operand must be standard layout");
        let os = out.as_slice_mut().expect("output must be standard layout");
        for i in 0..d {
            let orow = &mut os[i * d..(i + 1) * d];
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let v = self.vals[k];
                let xrow = &xs[self.cols[k] * d..(self.cols[k] + 1) * d];
                for (o, xv) in orow.iter_mut().zip(xrow.iter()) {
                    *o += v * *xv;
                }
            }
        }
    }

    /// out = x · self, iterating rows of x so both operands stream in order.
    pub fn mul_dense_right(&self, x: &CMat, out: &mut CMat) {
        let d = self.dim;
        debug_assert_eq!(x.ncols(), d);
        out.fill(C64::new(0.0, 0.0));
        let xs = x.as_slice().expect("dense operand must be standard layout");
        let os = out.as_slice_mut().expect("output must be standard layout");
        for r in 0..d {
            let xrow = &xs[r * d..(r + 1) * d];
            let orow = &mut os[r * d..(r + 1) * d];
            for i in 0..d {
                let xv = xrow[i];
                if xv.re == 0.0 && xv.im == 0.0 {
                    continue;
                }
                for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                    orow[self.cols[k]] += xv * self.vals[k];
                }
            }
        }
    }

    /// out = self · x for a vector operand.
    pub fn mul_vec(&self, x: &[C64], out: &mut [C64]) {
        debug_assert_eq!(x.len(), self.dim);
        for i in 0..self.dim {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            out[i] = acc;
        }
    }

    /// Trace of self · x.
    pub fn trace_mul(&self, x: &CMat) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.dim {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[[self.cols[k], i]];
            }
        }
        acc
    }
}

/// Operator representation picked by fill fraction at construction time.
#[derive(Debug, Clone)]
pub enum OpRepr {
    Dense(CMat),
    Sparse(CsrMatrix),
}

impl OpRepr {
    /// Sparse storage below 25% fill, dense otherwise.
    pub fn from_dense(m: &CMat) -> Self {
        let csr = CsrMatrix::from_dense(m, 0.0);
        let fill = csr.nnz() as f64 / (csr.dim * csr.dim) as f64;
        if fill < 0.25 {
            OpRepr::Sparse(csr)
        } else {
            OpRepr::Dense(m.clone())
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            OpRepr::Dense(m) => m.nrows(),
            OpRepr::Sparse(s) => s.dim,
        }
    }

    /// out = self · x.
    pub fn mul_dense(&self, x: &CMat, out: &mut CMat) {
        match self {
            OpRepr::Dense(m) => {
                let prod = m.dot(x);
                out.assign(&prod);
            }
            OpRepr::Sparse(s) => s.mul_dense(x, out),
        }
    }

    /// out = x · self.
    pub fn mul_dense_right(&self, x: &CMat, out: &mut CMat) {
        match self {
            OpRepr::Dense(m) => {
                let prod = x.dot(m);
                out.assign(&prod);
            }
            OpRepr::Sparse(s) => s.mul_dense_right(x, out),
        }
    }

    /// self · x for a vector operand.
    pub fn mul_vec(&self, x: &crate::CVec) -> crate::CVec {
        match self {
            OpRepr::Dense(m) => m.dot(x),
            OpRepr::Sparse(s) => {
                let mut out = vec![C64::new(0.0, 0.0); s.dim];
                s.mul_vec(x.as_slice().expect("contiguous vector"), &mut out);
                ndarray::Array1::from_vec(out)
            }
        }
    }

    pub fn trace_mul(&self, x: &CMat) -> C64 {
        match self {
            OpRepr::Dense(m) => m
                .outer_iter()
                .enumerate()
                .map(|(i, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(j, v)| *v * x[[j, i]])
                        .sum::<C64>()
                })
                .sum(),
            OpRepr::Sparse(s) => s.trace_mul(x),
        }
    }
}

/// out = a† in place of `out` (conjugate transpose of a square matrix).
pub fn dagger_into(a: &CMat, out: &mut CMat) {
    let d = a.nrows();
    for i in 0..d {
        for j in 0..d {
            out[[j, i]] = a[[i, j]].conj();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use ndarray::Array2;
    use rand::prelude::*;
    use rand_distr::StandardNormal;

    fn random_cmat(rng: &mut impl Rng, d: usize) -> CMat {
        Array2::from_shape_fn((d, d), |_| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        })
    }

    #[test]
    fn csr_matches_dense_product() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let d = 17;
        let mut a = random_cmat(&mut rng, d);
        // Sparsify.
        for i in 0..d {
            for j in 0..d {
                if (i + 2 * j) % 5 != 0 {
                    a[[i, j]] = C64::new(0.0, 0.0);
                }
            }
        }
        let x = random_cmat(&mut rng, d);
        let csr = CsrMatrix::from_dense(&a, 0.0);
        let mut out = Array2::zeros((d, d));
        csr.mul_dense(&x, &mut out);
        let reference = a.dot(&x);
        assert!(max_abs(&(&out - &reference)) < 1e-12);
        assert!(max_abs(&(&csr.to_dense() - &a)) < 1e-15);

        let mut right = Array2::zeros((d, d));
        csr.mul_dense_right(&x, &mut right);
        let reference_right = x.dot(&a);
        assert!(max_abs(&(&right - &reference_right)) < 1e-12);
    }

    #[test]
    fn trace_mul_matches() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let d = 9;
        let a = random_cmat(&mut rng, d);
        let x = random_cmat(&mut rng, d);
        let csr = CsrMatrix::from_dense(&a, 0.0);
        let direct = crate::linalg::trace(&a.dot(&x));
        assert!((csr.trace_mul(&x) - direct).norm() < 1e-10);
        let repr = OpRepr::Dense(a.clone());
        assert!((repr.trace_mul(&x) - direct).norm() < 1e-10);
    }
}
