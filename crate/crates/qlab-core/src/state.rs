//! Pure states: unit complex vectors with a fixed global-phase convention.

use alloc::vec::Vec;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fmath::cnorm;
use crate::mat::{self, Mat};

const NORM_TOL: f64 = 1e-12;

/// Unit vector in C^d. The first component of largest modulus is made real
/// and nonnegative on construction, so equal states compare equal entrywise.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Normalize and fix the global phase. Fails on (near-)zero vectors.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Empty { what: "state vector" });
        }
        let norm = mat::vec_norm(&amplitudes);
        if !norm.is_finite() || norm < 1e-9 {
            return Err(Error::NotNormalized { deviation: (norm - 1.0).abs() });
        }
        let mut amplitudes = amplitudes;
        canonicalize(&mut amplitudes);
        Ok(PureState { amplitudes })
    }

    /// Like `new` but rejects vectors whose norm deviates from 1 by more
    /// than 1e-12 instead of silently rescaling.
    pub fn from_normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = mat::vec_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { deviation: (norm - 1.0).abs() });
        }
        Self::new(amplitudes)
    }

    /// Standard basis vector `e_k`.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim);
        let mut v = alloc::vec![C64::new(0.0, 0.0); dim];
        v[k] = C64::new(1.0, 0.0);
        PureState { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// Rank-one projector `|psi><psi|`.
    pub fn projector(&self) -> Mat {
        Mat::outer(&self.amplitudes, &self.amplitudes)
    }

    /// Overlap `<self|other>`.
    pub fn overlap(&self, other: &PureState) -> C64 {
        mat::inner(&self.amplitudes, &other.amplitudes)
    }

    /// `|<self|other>|^2`.
    pub fn fidelity_with(&self, other: &PureState) -> f64 {
        self.overlap(other).norm_sqr()
    }

    /// Tensor product state, index `(i, j) -> i * other.dim + j`.
    pub fn tensor(&self, other: &PureState) -> PureState {
        let v = mat::kron_vec(&self.amplitudes, &other.amplitudes);
        // Product of canonical unit vectors is unit; canonicalize for the
        // phase convention only.
        PureState::new(v).expect("product of unit vectors is unit")
    }
}

/// In-place phase/norm canonicalization. Exactly idempotent: a vector that
/// is already canonical is returned bit-for-bit unchanged.
pub(crate) fn canonicalize(v: &mut [C64]) {
    let mut pivot = 0;
    let mut best = f64::NEG_INFINITY;
    for (i, a) in v.iter().enumerate() {
        let m = a.norm_sqr();
        if m > best {
            best = m;
            pivot = i;
        }
    }
    let p = v[pivot];
    let norm = mat::vec_norm(v);
    if p.im == 0.0 && p.re >= 0.0 && (norm - 1.0).abs() <= 1e-13 {
        return;
    }
    let modulus = cnorm(p);
    let phase = p.conj() / modulus;
    let scale = phase / norm;
    for a in v.iter_mut() {
        *a *= scale;
    }
    v[pivot] = C64::new(modulus / norm, 0.0);
}
