//! Validated Hermitian operators and POVMs, plus the spectral operations
//! (operator norm, dominating eigenvector, inverse square root) used
//! throughout the optimization code.

use alloc::vec::Vec;

use crate::fmath::LibmExt;

use crate::eig::{self, EigH};
use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::state::PureState;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const POVM_PSD_TOL: f64 = -1e-10;
pub const POVM_COMPLETENESS_TOL: f64 = 1e-10;
const PD_MIN_EIG: f64 = 1e-12;

/// Hermitian matrix, checked within 1e-12 entrywise and then symmetrized so
/// later spectral code sees an exactly conjugate-symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOp {
    entries: Mat,
}

impl HermitianOp {
    pub fn new(entries: Mat) -> Result<Self> {
        entries.ensure_square()?;
        if entries.rows() == 0 {
            return Err(Error::Empty { what: "operator" });
        }
        let dev = entries.hermitian_deviation();
        if !dev.is_finite() || dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        Ok(HermitianOp { entries: entries.hermitize() })
    }

    /// Symmetrize without a deviation check; for matrices that are Hermitian
    /// by construction up to roundoff larger than the strict tolerance.
    pub fn symmetrized(entries: Mat) -> Result<Self> {
        entries.ensure_square()?;
        if entries.rows() == 0 {
            return Err(Error::Empty { what: "operator" });
        }
        Ok(HermitianOp { entries: entries.hermitize() })
    }

    pub fn identity(dim: usize) -> Self {
        HermitianOp { entries: Mat::identity(dim) }
    }

    pub fn zero(dim: usize) -> Self {
        HermitianOp { entries: Mat::zeros(dim, dim) }
    }

    pub fn from_projector(state: &PureState) -> Self {
        HermitianOp { entries: state.projector() }
    }

    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    pub fn mat(&self) -> &Mat {
        &self.entries
    }

    pub fn into_mat(self) -> Mat {
        self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    pub fn add(&self, other: &HermitianOp) -> HermitianOp {
        HermitianOp { entries: self.entries.add(&other.entries) }
    }

    pub fn sub(&self, other: &HermitianOp) -> HermitianOp {
        HermitianOp { entries: self.entries.sub(&other.entries) }
    }

    pub fn scale(&self, k: f64) -> HermitianOp {
        HermitianOp { entries: self.entries.scale_re(k) }
    }

    pub fn eigh(&self) -> Result<EigH> {
        eig::eigh(&self.entries)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        eig::eigvalsh(&self.entries)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let vals = self.eigenvalues()?;
        Ok(*vals.last().expect("nonempty spectrum"))
    }

    /// `<psi| A |psi>` as a real number.
    pub fn expectation(&self, psi: &PureState) -> f64 {
        self.entries.quadratic_form(psi.amplitudes()).re
    }

    /// `Tr(A B)`, real for Hermitian inputs.
    pub fn trace_product(&self, other: &HermitianOp) -> f64 {
        trace_product(&self.entries, &other.entries)
    }
}

/// `Tr(A B)` for Hermitian matrices without forming the product.
pub fn trace_product(a: &Mat, b: &Mat) -> f64 {
    debug_assert_eq!(a.rows(), b.rows());
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            // Tr(AB) = sum_ij A[i,j] B[j,i]; for Hermitian B, B[j,i] = conj(B[i,j]).
            let prod = a[(i, j)] * b[(j, i)];
            acc += prod.re;
        }
    }
    acc
}

/// Tensor (Kronecker) product of Hermitian operators.
pub fn tensor(a: &HermitianOp, b: &HermitianOp) -> HermitianOp {
    HermitianOp { entries: a.mat().kron(b.mat()).hermitize() }
}

/// Largest absolute eigenvalue.
pub fn operator_norm(a: &HermitianOp) -> Result<f64> {
    let vals = a.eigenvalues()?;
    Ok(vals.iter().fold(0.0f64, |m, &x| m.max(x.abs())))
}

/// Largest eigenvalue with its canonicalized eigenvector. Ties resolve to
/// the eigensolver's stable descending order, then the phase convention.
pub fn dominating_eigenvector(a: &HermitianOp) -> Result<(f64, PureState)> {
    let e = a.eigh()?;
    let lambda = e.values[0];
    let v = e.vector(0);
    let state = PureState::new(v)?;
    Ok((lambda, state))
}

/// Inverse square root of a positive definite operator: `B` with
/// `B a B = I`.
pub fn inv_sqrt(a: &HermitianOp) -> Result<HermitianOp> {
    let e = a.eigh()?;
    let min = *e.values.last().expect("nonempty spectrum");
    if min <= PD_MIN_EIG {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
    }
    let b = e.apply_spectral(|lam| 1.0 / lam.lm_sqrt());
    HermitianOp::symmetrized(b)
}

/// Positive part `sum_{lambda > 0} lambda v v*`.
pub fn positive_part(a: &HermitianOp) -> Result<HermitianOp> {
    let e = a.eigh()?;
    HermitianOp::symmetrized(e.apply_spectral(|lam| lam.max(0.0)))
}

/// Finite list of PSD operators summing to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    dim: usize,
    elements: Vec<HermitianOp>,
}

impl Povm {
    pub fn new(elements: Vec<HermitianOp>) -> Result<Self> {
        let first = elements.first().ok_or(Error::Empty { what: "POVM" })?;
        let dim = first.dim();
        let mut sum = Mat::zeros(dim, dim);
        for e in &elements {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: e.dim() });
            }
            let min = e.min_eigenvalue()?;
            if min < POVM_PSD_TOL {
                return Err(Error::NotPositiveSemidefinite { min_eigenvalue: min });
            }
            sum = sum.add(e.mat());
        }
        let dev = sum.sub(&Mat::identity(dim)).max_abs_entry();
        if dev > POVM_COMPLETENESS_TOL {
            return Err(Error::IncompletePovm { deviation: dev });
        }
        Ok(Povm { dim, elements })
    }

    /// The trivial single-outcome POVM `{I}`.
    pub fn trivial(dim: usize) -> Self {
        Povm { dim, elements: alloc::vec![HermitianOp::identity(dim)] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[HermitianOp] {
        &self.elements
    }

    pub fn element(&self, b: usize) -> &HermitianOp {
        &self.elements[b]
    }
}
