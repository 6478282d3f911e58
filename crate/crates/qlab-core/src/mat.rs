//! Dense complex matrices and vectors, sized for desk-scale state spaces.
//!
//! Everything downstream works on dimensions of at most a few tens, so the
//! representation is a plain row-major `Vec<Complex64>` with no blocking or
//! sparsity. Operations allocate freely and return new values.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64 as C64;
use crate::fmath::{cnorm, LibmExt};

use crate::error::{Error, Result};

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Build from a row-major scalar slice; panics if the length is wrong.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data length mismatch");
        Mat { rows, cols, data }
    }

    pub fn diag(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = Mat::zeros(n, n);
        for (i, &x) in entries.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        m
    }

    /// Rank-one matrix `u v*`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Mat::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, k: C64) -> Mat {
        let data = self.data.iter().map(|a| a * k).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale_re(&self, k: f64) -> Mat {
        self.scale(C64::new(k, 0.0))
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Mat {
        let data = self.data.iter().map(|a| a.conj()).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn trace(&self) -> C64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().lm_sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|a| cnorm(*a)).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from the conjugate transpose.
    pub fn hermitian_deviation(&self) -> f64 {
        debug_assert!(self.is_square());
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max(cnorm(self[(i, j)] - self[(j, i)].conj()));
            }
        }
        dev
    }

    /// `(A + A*)/2`, exactly Hermitian up to floating-point symmetry of the
    /// averaging itself (the diagonal is forced real).
    pub fn hermitize(&self) -> Mat {
        debug_assert!(self.is_square());
        let mut out = Mat::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            out[(i, i)] = C64::new(self[(i, i)].re, 0.0);
            for j in (i + 1)..self.cols {
                let avg = (self[(i, j)] + self[(j, i)].conj()).scale(0.5);
                out[(i, j)] = avg;
                out[(j, i)] = avg.conj();
            }
        }
        out
    }

    /// Kronecker product; index `(i1 i2, j1 j2)` maps to `i1 * b.rows + i2`.
    pub fn kron(&self, b: &Mat) -> Mat {
        let mut out = Mat::zeros(self.rows * b.rows, self.cols * b.cols);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self[(i1, j1)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for i2 in 0..b.rows {
                    for j2 in 0..b.cols {
                        out[(i1 * b.rows + i2, j1 * b.cols + j2)] = a * b[(i2, j2)];
                    }
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self.data[i * self.cols + j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// `v* A v`, the quadratic form; real part only makes sense for Hermitian
    /// `A`, so the full complex value is returned.
    pub fn quadratic_form(&self, v: &[C64]) -> C64 {
        let av = self.matvec(v);
        inner(v, &av)
    }

    /// Partial trace over the first factor of a `d1*d2`-dimensional square
    /// matrix; the result is `d2 x d2`.
    pub fn partial_trace_left(&self, d1: usize, d2: usize) -> Mat {
        assert_eq!(self.rows, d1 * d2);
        assert!(self.is_square());
        Mat::from_fn(d2, d2, |j, l| {
            (0..d1).map(|i| self[(i * d2 + j, i * d2 + l)]).sum()
        })
    }

    /// Partial trace over the second factor; the result is `d1 x d1`.
    pub fn partial_trace_right(&self, d1: usize, d2: usize) -> Mat {
        assert_eq!(self.rows, d1 * d2);
        assert!(self.is_square());
        Mat::from_fn(d1, d1, |i, k| {
            (0..d2).map(|j| self[(i * d2 + j, k * d2 + j)]).sum()
        })
    }

    /// Entrywise check against another matrix.
    pub fn max_abs_diff(&self, other: &Mat) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| cnorm(a - b))
            .fold(0.0, f64::max)
    }

    pub(crate) fn ensure_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.rows, found: self.cols })
        }
    }
}

impl core::ops::Index<(usize, usize)> for Mat {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Mat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// `Tr(A B)` without forming the product.
pub fn trace_mul(a: &Mat, b: &Mat) -> C64 {
    debug_assert_eq!(a.cols(), b.rows());
    debug_assert_eq!(a.rows(), b.cols());
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Inner product `<u, v> = sum conj(u_i) v_i`.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    debug_assert_eq!(u.len(), v.len());
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().lm_sqrt()
}

/// Kronecker product of vectors, index `(i, j) -> i * v.len() + j`.
pub fn kron_vec(u: &[C64], v: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(u.len() * v.len());
    for a in u {
        for b in v {
            out.push(a * b);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_matmul() {
        let i3 = Mat::identity(3);
        let m = Mat::from_fn(3, 3, |i, j| c((i * 3 + j) as f64, -(j as f64)));
        assert_eq!(i3.matmul(&m), m);
        assert_eq!(m.matmul(&i3), m);
    }

    #[test]
    fn kron_identity() {
        let i2 = Mat::identity(2);
        assert_eq!(i2.kron(&i2), Mat::identity(4));
    }

    #[test]
    fn kron_diag() {
        let a = Mat::diag(&[1.0, 0.0]);
        let b = Mat::diag(&[0.0, 1.0]);
        assert_eq!(a.kron(&b), Mat::diag(&[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn partial_traces_recover_factors() {
        let a = Mat::from_fn(2, 2, |i, j| c((1 + i + 2 * j) as f64, 0.0)).hermitize();
        let b = Mat::from_fn(3, 3, |i, j| c(0.5 * (i as f64 - j as f64), (i + j) as f64))
            .hermitize();
        let ab = a.kron(&b);
        let tr_a = a.trace();
        let tr_b = b.trace();
        assert!(ab.partial_trace_left(2, 3).max_abs_diff(&b.scale(tr_a)) < 1e-12);
        assert!(ab.partial_trace_right(2, 3).max_abs_diff(&a.scale(tr_b)) < 1e-12);
    }

    #[test]
    fn adjoint_involution() {
        let m = Mat::from_fn(2, 3, |i, j| c(i as f64, j as f64 + 0.25));
        assert_eq!(m.adjoint().adjoint(), m);
    }
}
