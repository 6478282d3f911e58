//! Completely positive maps in Kraus or Holevo form, the ensemble map, the
//! maximal output norm, and the entanglement-breaking multiplicativity
//! checks built on it.
//!
//! A Holevo-form map `rho -> sum_k R_k Tr(X_k rho)` with PSD pairs is
//! entanglement breaking; its tensor action factors through the scalars
//! `x_k` and conditional marginals, which is exactly what
//! `appendix_chain_check` replays against an independent Kraus evaluation.

use alloc::vec::Vec;
use num_complex::Complex64 as C64;
use crate::fmath::{from_polar, LibmExt};

use crate::eig;
use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::mat::{self, Mat};
use crate::povm::{self, HermitianOp};
use crate::sample;
use crate::state::PureState;

/// Holevo terms whose input overlap falls below this are dropped from the
/// chain decomposition; they contribute nothing after the 1/x_k rescale.
pub const HOLEVO_TERM_DROP: f64 = 1e-14;

const EIG_CLIP: f64 = 1e-12;
const NU_MAX_ITERS: usize = 500;
const NU_REL_TOL: f64 = 1e-11;

#[derive(Clone, Debug)]
pub enum Representation {
    /// Operators mapping in_dim -> out_dim; the map is `sum_k A_k rho A_k*`.
    Kraus(Vec<Mat>),
    /// PSD pairs (R_k on the output, X_k on the input).
    Holevo(Vec<(HermitianOp, HermitianOp)>),
}

/// Completely positive map, not necessarily trace preserving.
#[derive(Clone, Debug)]
pub struct CpMap {
    in_dim: usize,
    out_dim: usize,
    repr: Representation,
}

impl CpMap {
    pub fn kraus(in_dim: usize, out_dim: usize, ops: Vec<Mat>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::Empty { what: "Kraus operator list" });
        }
        for a in &ops {
            if a.rows() != out_dim {
                return Err(Error::DimensionMismatch { expected: out_dim, found: a.rows() });
            }
            if a.cols() != in_dim {
                return Err(Error::DimensionMismatch { expected: in_dim, found: a.cols() });
            }
            if !a.data().iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::Numeric { what: "non-finite Kraus entry" });
            }
        }
        Ok(CpMap { in_dim, out_dim, repr: Representation::Kraus(ops) })
    }

    pub fn holevo(
        in_dim: usize,
        out_dim: usize,
        pairs: Vec<(HermitianOp, HermitianOp)>,
    ) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Empty { what: "Holevo term list" });
        }
        for (r, x) in &pairs {
            if r.dim() != out_dim {
                return Err(Error::DimensionMismatch { expected: out_dim, found: r.dim() });
            }
            if x.dim() != in_dim {
                return Err(Error::DimensionMismatch { expected: in_dim, found: x.dim() });
            }
            for op in [r, x] {
                let min = op.min_eigenvalue()?;
                if min < povm::POVM_PSD_TOL {
                    return Err(Error::NotPositiveSemidefinite { min_eigenvalue: min });
                }
            }
        }
        Ok(CpMap { in_dim, out_dim, repr: Representation::Holevo(pairs) })
    }

    pub fn identity(dim: usize) -> Self {
        CpMap { in_dim: dim, out_dim: dim, repr: Representation::Kraus(alloc::vec![Mat::identity(dim)]) }
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn is_holevo(&self) -> bool {
        matches!(self.repr, Representation::Holevo(_))
    }

    pub fn holevo_pairs(&self) -> Result<&[(HermitianOp, HermitianOp)]> {
        match &self.repr {
            Representation::Holevo(pairs) => Ok(pairs),
            Representation::Kraus(_) => {
                Err(Error::UnsupportedRepresentation { expected: "Holevo" })
            }
        }
    }

    /// Raw action on a matrix; no dimension validation.
    pub(crate) fn apply_mat(&self, rho: &Mat) -> Mat {
        match &self.repr {
            Representation::Kraus(ops) => {
                let mut out = Mat::zeros(self.out_dim, self.out_dim);
                for a in ops {
                    out = out.add(&a.matmul(rho).matmul(&a.adjoint()));
                }
                out
            }
            Representation::Holevo(pairs) => {
                let mut out = Mat::zeros(self.out_dim, self.out_dim);
                for (r, x) in pairs {
                    let t = mat::trace_mul(x.mat(), rho);
                    out = out.add(&r.mat().scale(t));
                }
                out
            }
        }
    }

    /// `m(rho)` with validation; the output is symmetrized Hermitian.
    pub fn apply(&self, rho: &HermitianOp) -> Result<HermitianOp> {
        if rho.dim() != self.in_dim {
            return Err(Error::DimensionMismatch { expected: self.in_dim, found: rho.dim() });
        }
        HermitianOp::symmetrized(self.apply_mat(rho.mat()))
    }

    /// Adjoint action under the trace pairing: `Tr(m(rho) Y) = Tr(rho m*(Y))`.
    pub(crate) fn adjoint_apply_mat(&self, y: &Mat) -> Mat {
        match &self.repr {
            Representation::Kraus(ops) => {
                let mut out = Mat::zeros(self.in_dim, self.in_dim);
                for a in ops {
                    out = out.add(&a.adjoint().matmul(y).matmul(a));
                }
                out
            }
            Representation::Holevo(pairs) => {
                let mut out = Mat::zeros(self.in_dim, self.in_dim);
                for (r, x) in pairs {
                    let t = mat::trace_mul(r.mat(), y);
                    out = out.add(&x.mat().scale(t));
                }
                out
            }
        }
    }

    /// Kraus operators for this map. Holevo terms expand through the
    /// eigendecompositions of R_k and X_k; eigenvalues below the clip are
    /// treated as zero.
    pub fn to_kraus_ops(&self) -> Result<Vec<Mat>> {
        match &self.repr {
            Representation::Kraus(ops) => Ok(ops.clone()),
            Representation::Holevo(pairs) => {
                let mut out = Vec::new();
                for (r, x) in pairs {
                    let er = r.eigh()?;
                    let ex = x.eigh()?;
                    for (a, &lam) in er.values.iter().enumerate() {
                        if lam <= EIG_CLIP {
                            continue;
                        }
                        let u = er.vector(a);
                        for (c, &mu) in ex.values.iter().enumerate() {
                            if mu <= EIG_CLIP {
                                continue;
                            }
                            let w = ex.vector(c);
                            // (out_dim x in_dim) operator sqrt(lam mu) |u><w|.
                            out.push(Mat::outer(&u, &w).scale_re((lam * mu).lm_sqrt()));
                        }
                    }
                }
                if out.is_empty() {
                    // The zero map: keep one zero operator so the form stays valid.
                    out.push(Mat::zeros(self.out_dim, self.in_dim));
                }
                Ok(out)
            }
        }
    }
}

/// The map `rho -> sum_i p_i P_i rho P_i` of an ensemble, in Holevo form
/// with pairs `(p_i P_i, P_i)`.
pub fn phi_from_ensemble(e: &Ensemble) -> CpMap {
    let pairs: Vec<(HermitianOp, HermitianOp)> = e
        .weights()
        .iter()
        .zip(e.states())
        .map(|(&p, s)| {
            let proj = HermitianOp::from_projector(s);
            (proj.scale(p), proj)
        })
        .collect();
    CpMap::holevo(e.dim(), e.dim(), pairs).expect("scaled projectors are PSD")
}

/// Tensor product of maps via pairwise Kraus products.
pub fn tensor_maps(m1: &CpMap, m2: &CpMap) -> Result<CpMap> {
    let k1 = m1.to_kraus_ops()?;
    let k2 = m2.to_kraus_ops()?;
    let mut ops = Vec::with_capacity(k1.len() * k2.len());
    for a in &k1 {
        for b in &k2 {
            ops.push(a.kron(b));
        }
    }
    CpMap::kraus(m1.in_dim * m2.in_dim, m1.out_dim * m2.out_dim, ops)
}

/// Result of a maximal-output-norm run.
#[derive(Clone, Debug)]
pub struct NuInfReport {
    pub value: f64,
    pub argmax_state: PureState,
    pub restarts_used: usize,
    pub best_per_restart: Vec<f64>,
}

/// Projected gradient ascent of `psi -> lambda_max(m(psi psi*)) - psi* K psi`
/// on the unit sphere, with step halving. `shift = None` is the plain output
/// norm; a quadratic shift is what the dual separation and the product
/// feasibility probes need.
pub(crate) fn ascend_quadratic_gap(
    m: &CpMap,
    shift: Option<&Mat>,
    start: &[C64],
) -> Result<(f64, Vec<C64>)> {
    let eval = |psi: &[C64]| -> Result<(f64, Vec<C64>)> {
        let (lam, u) = eig::lambda_max_pair(&m.apply_mat(&Mat::outer(psi, psi)))?;
        let val = match shift {
            Some(k) => lam - k.quadratic_form(psi).re,
            None => lam,
        };
        Ok((val, u))
    };

    let mut psi: Vec<C64> = start.to_vec();
    let (mut f, mut u) = eval(&psi)?;
    let mut step = 0.25;
    for _ in 0..NU_MAX_ITERS {
        // Euclidean gradient (up to a positive factor): m*(u u*) psi - K psi.
        let mut g = m.adjoint_apply_mat(&Mat::outer(&u, &u)).matvec(&psi);
        if let Some(k) = shift {
            let kp = k.matvec(&psi);
            for (gi, ki) in g.iter_mut().zip(&kp) {
                *gi -= ki;
            }
        }
        let ip = mat::inner(&psi, &g);
        let v: Vec<C64> = g.iter().zip(&psi).map(|(gi, pi)| gi - ip * pi).collect();
        if mat::vec_norm(&v) < 1e-13 {
            break;
        }
        let mut accepted = false;
        let mut rel = 0.0;
        while step > 1e-14 {
            let mut cand: Vec<C64> =
                psi.iter().zip(&v).map(|(pi, vi)| pi + vi * step).collect();
            let norm = mat::vec_norm(&cand);
            for z in cand.iter_mut() {
                *z /= norm;
            }
            let (fc, uc) = eval(&cand)?;
            if fc > f {
                rel = (fc - f) / f.abs().max(1e-12);
                psi = cand;
                f = fc;
                u = uc;
                step = (step * 1.5).min(4.0);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted || rel < NU_REL_TOL {
            break;
        }
    }
    Ok((f, psi))
}

/// Sweep the qubit state space on a 360x180 grid, returning the best point.
fn bloch_grid_best(m: &CpMap, shift: Option<&Mat>) -> Result<(f64, Vec<C64>)> {
    debug_assert_eq!(m.in_dim, 2);
    let mut best = f64::NEG_INFINITY;
    let mut best_psi = alloc::vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    for j in 0..180 {
        let theta = core::f64::consts::PI * (j as f64 + 0.5) / 180.0;
        let ct = (theta / 2.0).lm_cos();
        let st = (theta / 2.0).lm_sin();
        for k in 0..360 {
            let phi = 2.0 * core::f64::consts::PI * k as f64 / 360.0;
            let psi = [C64::new(ct, 0.0), from_polar(st, phi)];
            let lam = eig::lambda_max(&m.apply_mat(&Mat::outer(&psi, &psi)))?;
            let val = match shift {
                Some(kq) => lam - kq.quadratic_form(&psi).re,
                None => lam,
            };
            if val > best {
                best = val;
                best_psi = alloc::vec![psi[0], psi[1]];
            }
        }
    }
    Ok((best, best_psi))
}

/// Maximal output operator norm over pure input states: multistart ascent,
/// plus a Bloch-grid sweep with polish for qubit inputs.
pub fn nu_infinity(m: &CpMap, restarts: usize, seed: u64) -> Result<NuInfReport> {
    nu_infinity_with_starts(m, restarts, seed, &[])
}

/// `nu_infinity` with extra deterministic start states appended after the
/// seeded restarts (used to warm-start product maps at tensor argmaxes).
pub fn nu_infinity_with_starts(
    m: &CpMap,
    restarts: usize,
    seed: u64,
    extra_starts: &[PureState],
) -> Result<NuInfReport> {
    assert!(restarts >= 1);
    let mut best_per_restart = Vec::with_capacity(restarts + extra_starts.len() + 1);
    let mut best_val = f64::NEG_INFINITY;
    let mut best_psi: Vec<C64> = Vec::new();

    let mut record = |val: f64, psi: Vec<C64>, list: &mut Vec<f64>| {
        list.push(val);
        if val > best_val {
            best_val = val;
            best_psi = psi;
        }
    };

    for k in 0..restarts {
        let mut rng = sample::rng_stream(seed, k as u64);
        let start = sample::random_pure_state_rng(m.in_dim, &mut rng);
        let (v, psi) = ascend_quadratic_gap(m, None, start.amplitudes())?;
        record(v, psi, &mut best_per_restart);
    }
    for s in extra_starts {
        let (v, psi) = ascend_quadratic_gap(m, None, s.amplitudes())?;
        record(v, psi, &mut best_per_restart);
    }
    if m.in_dim == 2 {
        let (gv, gpsi) = bloch_grid_best(m, None)?;
        let (pv, ppsi) = ascend_quadratic_gap(m, None, &gpsi)?;
        let (v, psi) = if pv >= gv { (pv, ppsi) } else { (gv, gpsi) };
        record(v, psi, &mut best_per_restart);
    }

    if !best_val.is_finite() || best_per_restart.iter().any(|v| v.is_nan()) {
        return Err(Error::Numeric {
            what: "output-norm evaluation produced a non-finite value; the map's entries overflow f64 arithmetic",
        });
    }
    Ok(NuInfReport {
        value: best_val,
        argmax_state: PureState::new(best_psi)?,
        restarts_used: restarts,
        best_per_restart,
    })
}

/// Multiplicativity report for an entanglement-breaking factor.
#[derive(Clone, Debug)]
pub struct EbMultiplicativityReport {
    pub nu1: NuInfReport,
    pub nu2: NuInfReport,
    pub nu12: NuInfReport,
    pub gap: f64,
}

/// Compare `nu_inf(psi (x) omega)` against `nu_inf(psi) nu_inf(omega)` for a
/// Holevo-form `psi`. The product optimization is warm-started at the tensor
/// of the factor argmaxes, so the lower-bound direction holds by
/// construction up to roundoff.
pub fn check_eb_multiplicativity(
    psi: &CpMap,
    omega: &CpMap,
    restarts: usize,
    seed: u64,
) -> Result<EbMultiplicativityReport> {
    if !psi.is_holevo() {
        return Err(Error::UnsupportedRepresentation { expected: "Holevo" });
    }
    let nu1 = nu_infinity(psi, restarts, sample::derive_seed(seed, 1))?;
    let nu2 = nu_infinity(omega, restarts, sample::derive_seed(seed, 2))?;
    let product = tensor_maps(psi, omega)?;
    let warm = nu1.argmax_state.tensor(&nu2.argmax_state);
    let nu12 = nu_infinity_with_starts(
        &product,
        restarts.saturating_mul(2).max(1),
        sample::derive_seed(seed, 3),
        &[warm],
    )?;
    let gap = nu12.value - nu1.value * nu2.value;
    Ok(EbMultiplicativityReport { nu1, nu2, nu12, gap })
}

/// Term-by-term decomposition of a Holevo map's tensor action.
#[derive(Clone, Debug)]
pub struct AppendixReport {
    /// Input overlaps x_k = Tr[(X_k (x) I) tau12].
    pub x: Vec<f64>,
    /// Conditional outputs G_k; dropped terms are None.
    pub g_ops: Vec<Option<HermitianOp>>,
    /// Norm of the product map's output on tau12.
    pub lhs: f64,
    /// (max_k |G_k|) * |psi(tau1)|.
    pub rhs: f64,
    pub reconstruction_error: f64,
    pub marginal_error: f64,
    pub holds: bool,
}

const APPENDIX_RECON_TOL: f64 = 1e-9;
const APPENDIX_CHAIN_SLACK: f64 = 1e-10;

/// Decompose `(psi (x) omega)(tau12)` through the Holevo terms of `psi` and
/// verify three facts: the term-sum reconstruction matches an independent
/// Kraus-route evaluation, the marginal identity `psi(tau1) = sum_k x_k R_k`
/// holds, and the output norm is bounded by `max_k |G_k| * |psi(tau1)|`.
/// The seed drives a Rayleigh-quotient audit of the norm on the lhs.
pub fn appendix_chain_check(
    psi: &CpMap,
    omega: &CpMap,
    tau12: &HermitianOp,
    seed: u64,
) -> Result<AppendixReport> {
    let pairs = psi.holevo_pairs()?;
    let d1 = psi.in_dim;
    let d2 = omega.in_dim;
    if tau12.dim() != d1 * d2 {
        return Err(Error::DimensionMismatch { expected: d1 * d2, found: tau12.dim() });
    }
    let out_total = psi.out_dim * omega.out_dim;
    let i2 = Mat::identity(d2);

    let mut x = Vec::with_capacity(pairs.len());
    let mut g_ops: Vec<Option<HermitianOp>> = Vec::with_capacity(pairs.len());
    let mut recon = Mat::zeros(out_total, out_total);
    let mut marginal_sum = Mat::zeros(psi.out_dim, psi.out_dim);

    for (r_k, x_k) in pairs {
        let xk_i = x_k.mat().kron(&i2);
        let xk = mat::trace_mul(&xk_i, tau12.mat()).re;
        x.push(xk);
        if xk <= HOLEVO_TERM_DROP {
            g_ops.push(None);
            continue;
        }
        let g_prime = xk_i
            .matmul(tau12.mat())
            .partial_trace_left(d1, d2)
            .scale_re(1.0 / xk);
        let g_prime = HermitianOp::symmetrized(g_prime)?;
        let g_k = omega.apply(&g_prime)?;
        recon = recon.add(&r_k.mat().kron(g_k.mat()).scale_re(xk));
        marginal_sum = marginal_sum.add(&r_k.mat().scale_re(xk));
        g_ops.push(Some(g_k));
    }

    let direct = tensor_maps(psi, omega)?.apply_mat(tau12.mat());
    let reconstruction_error = direct.max_abs_diff(&recon);

    let tau1 = tau12.mat().partial_trace_right(d1, d2);
    let psi_tau1 = psi.apply_mat(&tau1);
    let marginal_error = psi_tau1.max_abs_diff(&marginal_sum);

    let lhs = povm::operator_norm(&HermitianOp::symmetrized(direct.clone())?)?;
    let marginal_norm = povm::operator_norm(&HermitianOp::symmetrized(psi_tau1)?)?;
    let mut max_g: f64 = 0.0;
    for g in g_ops.iter().flatten() {
        max_g = max_g.max(povm::operator_norm(g)?);
    }
    let rhs = max_g * marginal_norm;

    // Seeded audit: no Rayleigh quotient may exceed the reported norm.
    let mut rng = sample::rng_from_seed(seed);
    let mut rayleigh: f64 = 0.0;
    for _ in 0..256 {
        let v = sample::random_pure_state_rng(out_total, &mut rng);
        rayleigh = rayleigh.max(direct.quadratic_form(v.amplitudes()).re.abs());
    }

    let holds = reconstruction_error <= APPENDIX_RECON_TOL
        && marginal_error <= APPENDIX_RECON_TOL
        && lhs <= rhs + APPENDIX_CHAIN_SLACK
        && rayleigh <= lhs + 1e-9;

    Ok(AppendixReport { x, g_ops, lhs, rhs, reconstruction_error, marginal_error, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn replace_with_maximally_mixed() -> CpMap {
        let half = HermitianOp::identity(2).scale(0.5);
        CpMap::holevo(2, 2, vec![(half, HermitianOp::identity(2))]).unwrap()
    }

    #[test]
    fn holevo_constant_map() {
        let m = replace_with_maximally_mixed();
        let rho = HermitianOp::from_projector(&PureState::basis(2, 1));
        let out = m.apply(&rho).unwrap();
        assert!(out.mat().max_abs_diff(&Mat::identity(2).scale_re(0.5)) < 1e-15);
    }

    #[test]
    fn kraus_identity_map() {
        let id = CpMap::identity(3);
        let rho = HermitianOp::from_projector(&sample::random_pure_state(3, 5));
        let out = id.apply(&rho).unwrap();
        assert!(out.mat().max_abs_diff(rho.mat()) < 1e-15);
    }

    #[test]
    fn phi_single_projector_fixed_point() {
        let e1 = PureState::basis(2, 0);
        let e = Ensemble::new(vec![1.0], vec![e1.clone()]).unwrap();
        let phi = phi_from_ensemble(&e);
        let out = phi.apply(&HermitianOp::from_projector(&e1)).unwrap();
        assert!(out.mat().max_abs_diff(&e1.projector()) < 1e-15);
    }

    #[test]
    fn phi_orthonormal_basis_on_mixed() {
        let e = Ensemble::uniform(vec![PureState::basis(2, 0), PureState::basis(2, 1)]).unwrap();
        let phi = phi_from_ensemble(&e);
        let rho = HermitianOp::identity(2).scale(0.5);
        let out = phi.apply(&rho).unwrap();
        assert!(out.mat().max_abs_diff(&Mat::identity(2).scale_re(0.25)) < 1e-15);
    }

    #[test]
    fn holevo_matches_kraus_conversion() {
        let mut rng = sample::rng_from_seed(11);
        for _ in 0..20 {
            let m = sample::random_eb_map_rng(2, 2, &mut rng);
            let kraus = CpMap::kraus(2, 2, m.to_kraus_ops().unwrap()).unwrap();
            let rho = sample::random_psd_rng(2, 2, &mut rng);
            let a = m.apply(&rho).unwrap();
            let b = kraus.apply(&rho).unwrap();
            assert!(a.mat().max_abs_diff(b.mat()) < 1e-10);
        }
    }

    #[test]
    fn tensor_maps_factorizes_on_products() {
        let mut rng = sample::rng_from_seed(3);
        let m1 = sample::random_eb_map_rng(2, 2, &mut rng);
        let m2 = sample::random_cp_map_rng(2, 2, &mut rng);
        let prod = tensor_maps(&m1, &m2).unwrap();
        let rho = sample::random_psd_rng(2, 1, &mut rng);
        let sigma = sample::random_psd_rng(2, 2, &mut rng);
        let lhs = prod
            .apply(&povm::tensor(&rho, &sigma))
            .unwrap();
        let rhs = povm::tensor(&m1.apply(&rho).unwrap(), &m2.apply(&sigma).unwrap());
        assert!(lhs.mat().max_abs_diff(rhs.mat()) < 1e-10);
    }

    #[test]
    fn tensor_of_identities() {
        let prod = tensor_maps(&CpMap::identity(2), &CpMap::identity(2)).unwrap();
        let rho = sample::random_psd_rng(4, 4, &mut sample::rng_from_seed(8));
        assert!(prod.apply(&rho).unwrap().mat().max_abs_diff(rho.mat()) < 1e-12);
    }

    #[test]
    fn nu_identity_channel() {
        let rep = nu_infinity(&CpMap::identity(2), 2, 0).unwrap();
        assert!((rep.value - 1.0).abs() < 1e-9);
        assert_eq!(rep.restarts_used, 2);
        let max = rep.best_per_restart.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!((rep.value - max).abs() < 1e-15);
    }

    #[test]
    fn nu_constant_map() {
        let rep = nu_infinity(&replace_with_maximally_mixed(), 2, 1).unwrap();
        assert!((rep.value - 0.5).abs() < 1e-9);
    }

    #[test]
    fn nu_single_state_ensemble_map() {
        let psi = sample::random_pure_state(2, 77);
        let e = Ensemble::new(vec![1.0], vec![psi.clone()]).unwrap();
        let rep = nu_infinity(&phi_from_ensemble(&e), 4, 2).unwrap();
        assert!((rep.value - 1.0).abs() < 1e-9);
        assert!(rep.argmax_state.fidelity_with(&psi) > 1.0 - 1e-6);
    }

    #[test]
    fn eb_identity_pair_gap_zero() {
        let id_pairs = vec![(HermitianOp::identity(2), HermitianOp::identity(2))];
        // Identity is not Holevo-representable; use a faithful surrogate:
        // psi = replace-with-mixed has nu 0.5 and factorizes exactly.
        let _ = id_pairs;
        let psi = replace_with_maximally_mixed();
        let omega = CpMap::identity(2);
        let rep = check_eb_multiplicativity(&psi, &omega, 4, 3).unwrap();
        assert!((rep.nu1.value - 0.5).abs() < 1e-9);
        assert!((rep.nu2.value - 1.0).abs() < 1e-9);
        assert!(rep.gap.abs() < 1e-6);
    }

    #[test]
    fn appendix_product_input_recovers_sigma() {
        let mut rng = sample::rng_from_seed(21);
        let psi = sample::random_eb_map_rng(2, 2, &mut rng);
        let omega = sample::random_cp_map_rng(2, 2, &mut rng);
        let rho = sample::random_psd_rng(2, 2, &mut rng);
        let rho = rho.scale(1.0 / rho.trace());
        let sigma = sample::random_psd_rng(2, 2, &mut rng);
        let sigma = sigma.scale(1.0 / sigma.trace());
        let tau = povm::tensor(&rho, &sigma);
        let rep = appendix_chain_check(&psi, &omega, &tau, 9).unwrap();
        assert!(rep.holds);
        // Every kept G_k equals omega(sigma): the conditional marginal of a
        // product input is sigma itself.
        let expect = omega.apply(&sigma).unwrap();
        for g in rep.g_ops.iter().flatten() {
            assert!(g.mat().max_abs_diff(expect.mat()) < 1e-9);
        }
    }

    #[test]
    fn appendix_x_equals_one_for_identity_x() {
        let half = HermitianOp::identity(2).scale(0.5);
        let psi = CpMap::holevo(2, 2, vec![(half, HermitianOp::identity(2))]).unwrap();
        let omega = CpMap::identity(2);
        let mut rng = sample::rng_from_seed(4);
        let tau = sample::random_density_rng(2, 2, &mut rng);
        let rep = appendix_chain_check(&psi, &omega, &tau, 5).unwrap();
        assert!((rep.x[0] - 1.0).abs() < 1e-12);
        // G'_1 is the second marginal; omega = id keeps it.
        let tau2 = tau.mat().partial_trace_left(2, 2);
        let g = rep.g_ops[0].as_ref().unwrap();
        assert!(g.mat().max_abs_diff(&tau2) < 1e-10);
        assert!(rep.holds);
    }
}
