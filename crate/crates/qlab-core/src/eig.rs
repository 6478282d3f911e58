//! Hermitian eigendecomposition via cyclic Jacobi rotations.
//!
//! Dimensions here stay small (at most ~20 after tensor products), so the
//! quadratically convergent Jacobi sweep is both simple and accurate enough
//! to hold the residual contracts the rest of the crate relies on.

use alloc::vec::Vec;
use num_complex::Complex64 as C64;
use crate::fmath::{cnorm, LibmExt};

use crate::error::{Error, Result};
use crate::mat::Mat;

/// Eigendecomposition of a Hermitian matrix: `values` descending, column `k`
/// of `vectors` is the unit eigenvector for `values[k]`.
#[derive(Clone, Debug)]
pub struct EigH {
    pub values: Vec<f64>,
    pub vectors: Mat,
}

const MAX_SWEEPS: usize = 64;

fn off_diag_norm(a: &Mat) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            acc += 2.0 * a[(i, j)].norm_sqr();
        }
    }
    acc.lm_sqrt()
}

/// One Jacobi rotation zeroing `a[(p, q)]`; accumulates the rotation into
/// `v` when present. `a` must be Hermitian.
fn rotate(a: &mut Mat, v: Option<&mut Mat>, p: usize, q: usize) {
    let beta = a[(p, q)];
    let r = cnorm(beta);
    if r == 0.0 {
        return;
    }
    let phase = beta / r;
    let alpha = a[(p, p)].re;
    let gamma = a[(q, q)].re;
    let tau = (gamma - alpha) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).lm_sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).lm_sqrt())
    };
    let c = 1.0 / (1.0 + t * t).lm_sqrt();
    let s = t * c;
    let cs = C64::new(c, 0.0);
    let sp = phase * s;

    let n = a.rows();
    // Columns: A <- A U with U_pp = c, U_pq = s phase, U_qp = -s conj(phase),
    // U_qq = c.
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * cs - aiq * sp.conj();
        a[(i, q)] = aip * sp + aiq * cs;
    }
    // Rows: A <- U* A.
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = apj * cs - aqj * sp;
        a[(q, j)] = apj * sp.conj() + aqj * cs;
    }
    // Clean the pivot pair so roundoff cannot leave a stray imaginary part.
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    if let Some(v) = v {
        for i in 0..n {
            let vip = v[(i, p)];
            let viq = v[(i, q)];
            v[(i, p)] = vip * cs - viq * sp.conj();
            v[(i, q)] = vip * sp + viq * cs;
        }
    }
}

fn jacobi(a: &Mat, want_vectors: bool) -> Result<(Vec<f64>, Option<Mat>)> {
    a.ensure_square()?;
    let n = a.rows();
    let mut work = a.hermitize();
    let mut vecs = if want_vectors { Some(Mat::identity(n)) } else { None };
    let scale = work.frobenius_norm().max(1.0);
    let target = 1e-14 * scale;

    let mut converged = off_diag_norm(&work) <= target;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if cnorm(work[(p, q)]) > 1e-300 {
                    rotate(&mut work, vecs.as_mut(), p, q);
                }
            }
        }
        converged = off_diag_norm(&work) <= target;
    }
    if !converged {
        return Err(Error::Numeric { what: "jacobi eigensolver did not converge" });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| work[(i, i)].re).collect();
    // Stable descending sort so ties keep their original relative order.
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());

    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vectors = vecs.map(|v| {
        Mat::from_fn(n, n, |i, k| v[(i, order[k])])
    });
    Ok((values, vectors))
}

/// Full eigendecomposition; eigenvalues descending.
pub fn eigh(a: &Mat) -> Result<EigH> {
    let (values, vectors) = jacobi(a, true)?;
    Ok(EigH { values, vectors: vectors.unwrap() })
}

/// Largest eigenvalue (signed). Closed form for 1x1 and 2x2, Jacobi above.
pub fn lambda_max(a: &Mat) -> Result<f64> {
    match a.rows() {
        1 => Ok(a[(0, 0)].re),
        2 => Ok(two_by_two(a).0),
        _ => Ok(eigvalsh(a)?[0]),
    }
}

/// Largest eigenvalue with a unit eigenvector.
pub fn lambda_max_pair(a: &Mat) -> Result<(f64, Vec<C64>)> {
    match a.rows() {
        1 => Ok((a[(0, 0)].re, alloc::vec![C64::new(1.0, 0.0)])),
        2 => {
            let (lam, v) = two_by_two(a);
            Ok((lam, v))
        }
        _ => {
            let e = eigh(a)?;
            Ok((e.values[0], e.vector(0)))
        }
    }
}

/// Closed-form dominant eigenpair of a 2x2 Hermitian matrix.
fn two_by_two(m: &Mat) -> (f64, Vec<C64>) {
    let a = m[(0, 0)].re;
    let c = m[(1, 1)].re;
    let b = (m[(0, 1)] + m[(1, 0)].conj()).scale(0.5);
    let mean = 0.5 * (a + c);
    let delta = 0.5 * (a - c);
    let r = (delta * delta + b.norm_sqr()).lm_sqrt();
    let lam = mean + r;
    if r < 1e-300 {
        return (lam, alloc::vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    }
    // Pick the better-conditioned eigenvector formula: (lam - c, conj(b))
    // grows with a - c, (b, lam - a) with c - a.
    let v = if a >= c {
        alloc::vec![C64::new(lam - c, 0.0), b.conj()]
    } else {
        alloc::vec![b, C64::new(lam - a, 0.0)]
    };
    let norm = (v[0].norm_sqr() + v[1].norm_sqr()).lm_sqrt();
    (lam, alloc::vec![v[0] / norm, v[1] / norm])
}

/// Eigenvalues only, descending.
pub fn eigvalsh(a: &Mat) -> Result<Vec<f64>> {
    Ok(jacobi(a, false)?.0)
}

impl EigH {
    /// Column `k` as an owned vector.
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.vectors.rows()).map(|i| self.vectors[(i, k)]).collect()
    }

    /// Rebuild `sum_k f(lambda_k) v_k v_k*`.
    pub fn apply_spectral(&self, f: impl Fn(f64) -> f64) -> Mat {
        let n = self.vectors.rows();
        let mut out = Mat::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let flam = f(lam);
            if flam == 0.0 {
                continue;
            }
            let v = self.vector(k);
            out = out.add(&Mat::outer(&v, &v).scale_re(flam));
        }
        out
    }
}
