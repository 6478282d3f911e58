//! Seeded random generators for test harnesses and multistart optimizers.
//!
//! All sampling flows through ChaCha8 streams derived deterministically from
//! a root seed, so every computed quantity is replayable from (inputs, seed).

use alloc::vec::Vec;
use num_complex::Complex64 as C64;
use crate::fmath::LibmExt;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::CpMap;
use crate::ensemble::{Ensemble, JointDistribution};
use crate::error::Result;
use crate::mat::Mat;
use crate::povm::{HermitianOp, Povm};
use crate::state::PureState;

/// Root RNG for a seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `k` of the root seed; used to hand each restart or
/// trial its own deterministic generator regardless of scheduling order.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Deterministic sub-seed for a tagged child computation (splitmix64 mix),
/// so sibling optimizations never share streams.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Standard normal via Box-Muller on uniform draws.
pub fn std_normal(rng: &mut impl RngCore) -> f64 {
    loop {
        let u1: f64 = rng.gen::<f64>();
        if u1 > 1e-300 {
            let u2: f64 = rng.gen::<f64>();
            let r = (-2.0 * u1.lm_ln()).lm_sqrt();
            return r * (2.0 * core::f64::consts::PI * u2).lm_cos();
        }
    }
}

/// Complex standard normal entries.
pub fn gaussian_vector(dim: usize, rng: &mut impl RngCore) -> Vec<C64> {
    (0..dim).map(|_| C64::new(std_normal(rng), std_normal(rng))).collect()
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut impl RngCore) -> Mat {
    Mat::from_fn(rows, cols, |_, _| C64::new(std_normal(rng), std_normal(rng)))
}

/// Haar-random pure state: normalized complex Gaussian vector.
pub fn random_pure_state(dim: usize, seed: u64) -> PureState {
    assert!(dim >= 1);
    let mut rng = rng_from_seed(seed);
    random_pure_state_rng(dim, &mut rng)
}

pub fn random_pure_state_rng(dim: usize, rng: &mut impl RngCore) -> PureState {
    loop {
        if let Ok(s) = PureState::new(gaussian_vector(dim, rng)) {
            return s;
        }
    }
}

/// Random PSD matrix `G G*` with Gaussian `G` of the given inner rank.
pub fn random_psd_rng(dim: usize, rank: usize, rng: &mut impl RngCore) -> HermitianOp {
    let g = gaussian_matrix(dim, rank.max(1), rng);
    HermitianOp::symmetrized(g.matmul(&g.adjoint())).expect("square by construction")
}

/// Random POVM. Outcome operators come from frames renormalized by
/// `S^{-1/2} (.) S^{-1/2}` with `S` the frame sum: rank-one frames when
/// `outcomes >= dim`, full-rank Wishart frames when `1 < outcomes < dim`
/// (rank-one frames cannot sum to full rank there), and `{I}` for a single
/// outcome. If `S` is numerically singular the seed is bumped and the draw
/// repeated.
pub fn random_povm(dim: usize, outcomes: usize, seed: u64) -> Povm {
    assert!(dim >= 1 && outcomes >= 1);
    if outcomes == 1 {
        return Povm::trivial(dim);
    }
    for attempt in 0..64 {
        let mut rng = rng_from_seed(seed.wrapping_add(attempt));
        if let Some(p) = try_random_povm(dim, outcomes, &mut rng) {
            return p;
        }
    }
    unreachable!("repeated singular frame sums over 64 independent seeds");
}

pub fn random_povm_rng(dim: usize, outcomes: usize, rng: &mut impl RngCore) -> Povm {
    assert!(dim >= 1 && outcomes >= 1);
    if outcomes == 1 {
        return Povm::trivial(dim);
    }
    loop {
        if let Some(p) = try_random_povm(dim, outcomes, rng) {
            return p;
        }
    }
}

fn try_random_povm(dim: usize, outcomes: usize, rng: &mut impl RngCore) -> Option<Povm> {
    let frames: Vec<Mat> = (0..outcomes)
        .map(|_| {
            if outcomes >= dim {
                let v = gaussian_vector(dim, rng);
                Mat::outer(&v, &v)
            } else {
                let g = gaussian_matrix(dim, dim, rng);
                g.matmul(&g.adjoint())
            }
        })
        .collect();
    let mut s = Mat::zeros(dim, dim);
    for f in &frames {
        s = s.add(f);
    }
    let s_op = HermitianOp::symmetrized(s).ok()?;
    let s_inv_sqrt = crate::povm::inv_sqrt(&s_op).ok()?;
    let elements: Vec<HermitianOp> = frames
        .iter()
        .map(|f| {
            let e = s_inv_sqrt.mat().matmul(f).matmul(s_inv_sqrt.mat());
            HermitianOp::symmetrized(e).expect("square by construction")
        })
        .collect();
    Povm::new(elements).ok()
}

/// Dirichlet(1,...,1) weights: uniform on the simplex.
pub fn random_weights_rng(n: usize, rng: &mut impl RngCore) -> Vec<f64> {
    let mut draws: Vec<f64> = (0..n)
        .map(|_| {
            let u: f64 = rng.gen::<f64>().max(1e-12);
            -u.lm_ln()
        })
        .collect();
    let sum: f64 = draws.iter().sum();
    for d in draws.iter_mut() {
        *d /= sum;
    }
    // Exact renormalization of the roundoff residue onto the last weight.
    let s: f64 = draws.iter().sum();
    if let Some(last) = draws.last_mut() {
        *last += 1.0 - s;
        if *last < 0.0 {
            *last = 0.0;
        }
    }
    normalize_weights(&mut draws);
    draws
}

/// Clip to nonnegative and rescale to sum exactly 1 (within f64 addition).
pub fn normalize_weights(w: &mut [f64]) {
    for x in w.iter_mut() {
        if !x.is_finite() || *x < 0.0 {
            *x = 0.0;
        }
    }
    let sum: f64 = w.iter().sum();
    if sum <= 0.0 {
        let u = 1.0 / w.len() as f64;
        for x in w.iter_mut() {
            *x = u;
        }
    } else {
        for x in w.iter_mut() {
            *x /= sum;
        }
    }
    let s: f64 = w.iter().sum();
    let correction = 1.0 - s;
    if let Some(idx) = w
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
    {
        w[idx] += correction;
    }
}

/// Random ensemble of 2..=max_states Haar states with Dirichlet weights,
/// resampled until the states span the space when `spanning` is requested.
pub fn random_ensemble_rng(
    dim: usize,
    max_states: usize,
    spanning: bool,
    rng: &mut impl RngCore,
) -> Result<Ensemble> {
    let lo = dim.min(max_states);
    loop {
        let n = if max_states > lo { rng.gen_range(lo..=max_states) } else { lo };
        let states: Vec<PureState> = (0..n).map(|_| random_pure_state_rng(dim, rng)).collect();
        if spanning && !states_span(dim, &states) {
            continue;
        }
        let weights = random_weights_rng(n, rng);
        return Ensemble::new(weights, states);
    }
}

/// Rank check on the Gram matrix of the states.
pub fn states_span(dim: usize, states: &[PureState]) -> bool {
    if states.len() < dim {
        return false;
    }
    let mut gram_sum = Mat::zeros(dim, dim);
    for s in states {
        gram_sum = gram_sum.add(&s.projector());
    }
    match crate::eig::eigvalsh(&gram_sum) {
        Ok(vals) => vals.last().map(|&m| m > 1e-10).unwrap_or(false),
        Err(_) => false,
    }
}

/// Random entanglement-breaking map in Holevo form with 2..=4 terms,
/// scaled so its maximal output norm is ~1 or below.
pub fn random_eb_map_rng(dim_in: usize, dim_out: usize, rng: &mut impl RngCore) -> CpMap {
    let terms = rng.gen_range(2..=4usize);
    let mut pairs: Vec<(HermitianOp, HermitianOp)> = (0..terms)
        .map(|_| {
            let r = random_psd_rng(dim_out, dim_out, rng);
            let x = random_psd_rng(dim_in, dim_in, rng);
            (r, x)
        })
        .collect();
    // Bound nu_inf by 1: ||sum_k R_k Tr(X_k rho)|| <= || sum_k ||X_k|| R_k ||
    // for density rho, so divide every R_k by that bound.
    let mut bound = Mat::zeros(dim_out, dim_out);
    for (r, x) in &pairs {
        let xn = crate::povm::operator_norm(x).expect("psd norm");
        bound = bound.add(&r.mat().scale_re(xn));
    }
    let b = crate::povm::operator_norm(&HermitianOp::symmetrized(bound).unwrap())
        .expect("psd norm")
        .max(1e-9);
    for (r, _) in pairs.iter_mut() {
        *r = r.scale(1.0 / b);
    }
    CpMap::holevo(dim_in, dim_out, pairs).expect("psd pairs by construction")
}

/// Random CP map with 2..=4 Gaussian Kraus operators, scaled so
/// `sum A* A <= I` (hence nu_inf <= 1).
pub fn random_cp_map_rng(dim_in: usize, dim_out: usize, rng: &mut impl RngCore) -> CpMap {
    let terms = rng.gen_range(2..=4usize);
    let mut ops: Vec<Mat> = (0..terms).map(|_| gaussian_matrix(dim_out, dim_in, rng)).collect();
    let mut gram = Mat::zeros(dim_in, dim_in);
    for a in &ops {
        gram = gram.add(&a.adjoint().matmul(a));
    }
    let g = crate::povm::operator_norm(&HermitianOp::symmetrized(gram).unwrap())
        .expect("psd norm")
        .max(1e-9);
    let scale = 1.0 / g.lm_sqrt();
    for a in ops.iter_mut() {
        *a = a.scale_re(scale);
    }
    CpMap::kraus(dim_in, dim_out, ops).expect("consistent shapes")
}

/// Random bipartite density matrix on `d1*d2`: half the draws are pure
/// Haar states (maximally entangled on average), half rank-2 mixtures.
pub fn random_density_rng(d1: usize, d2: usize, rng: &mut impl RngCore) -> HermitianOp {
    let d = d1 * d2;
    let pure: bool = rng.gen();
    let rho = if pure {
        random_pure_state_rng(d, rng).projector()
    } else {
        let a = random_pure_state_rng(d, rng).projector();
        let b = random_pure_state_rng(d, rng).projector();
        let w: f64 = rng.gen_range(0.05..0.95);
        a.scale_re(w).add(&b.scale_re(1.0 - w))
    };
    HermitianOp::symmetrized(rho).expect("square by construction")
}

/// Random correlated joint distribution, resampled away from (near-)product
/// form so correlation tests actually exercise conditioning.
pub fn random_joint_rng(rows: usize, cols: usize, rng: &mut impl RngCore) -> JointDistribution {
    loop {
        let mut probs = random_weights_rng(rows * cols, rng);
        normalize_weights(&mut probs);
        let p = JointDistribution::new(rows, cols, probs).expect("normalized weights");
        let pr = p.marginal_rows();
        let pc = p.marginal_cols();
        let mut dev = 0.0f64;
        for i in 0..rows {
            for j in 0..cols {
                dev = dev.max((p.prob(i, j) - pr[i] * pc[j]).abs());
            }
        }
        if dev > 0.02 {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_state_deterministic() {
        let a = random_pure_state(2, 42);
        let b = random_pure_state(2, 42);
        assert_eq!(a, b);
        let c = random_pure_state(2, 43);
        assert!(a.fidelity_with(&c) < 1.0 - 1e-6);
    }

    #[test]
    fn povm_single_outcome_is_identity() {
        let p = random_povm(2, 1, 0);
        assert_eq!(p.len(), 1);
        assert!(p.element(0).mat().max_abs_diff(&Mat::identity(2)) < 1e-15);
    }

    #[test]
    fn povm_valid_across_shapes() {
        for (dim, outcomes) in [(2usize, 2usize), (2, 4), (3, 2), (3, 9), (4, 4)] {
            for seed in 0..5u64 {
                let p = random_povm(dim, outcomes, seed);
                assert_eq!(p.len(), outcomes);
                assert_eq!(p.dim(), dim);
                // Povm::new already enforced PSD and completeness.
                let tr: f64 = p.elements().iter().map(|e| e.trace()).sum();
                assert!((tr - dim as f64).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn povm_deterministic() {
        let a = random_povm(2, 3, 42);
        let b = random_povm(2, 3, 42);
        assert_eq!(a, b);
    }

    #[test]
    fn weights_on_simplex() {
        let mut rng = rng_from_seed(7);
        for n in 1..6 {
            let w = random_weights_rng(n, &mut rng);
            assert_eq!(w.len(), n);
            assert!(w.iter().all(|&x| x >= 0.0));
            let s: f64 = w.iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn spanning_check() {
        let basis = alloc::vec![PureState::basis(2, 0), PureState::basis(2, 1)];
        assert!(states_span(2, &basis));
        let repeated = alloc::vec![PureState::basis(2, 0), PureState::basis(2, 0)];
        assert!(!states_span(2, &repeated));
    }
}
