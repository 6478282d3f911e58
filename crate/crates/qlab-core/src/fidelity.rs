//! Accessible fidelity of an ensemble, bracketed from both sides:
//! a primal seesaw over (POVM, resend states) supplies certified lower
//! bounds, and an exchange-method dual solver produces feasible
//! certificates whose trace upper-bounds the optimum.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64 as C64;
use crate::fmath::{cnorm, from_polar, LibmExt};

use crate::channel::{ascend_quadratic_gap, nu_infinity, phi_from_ensemble, CpMap};
use crate::eig;
use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::mat::{self, Mat};
use crate::povm::{self, HermitianOp, Povm};
use crate::sample;
use crate::state::PureState;

/// A measurement together with one substitute state per outcome.
#[derive(Clone, Debug)]
pub struct EavesdropStrategy {
    pub povm: Povm,
    pub resend_states: Vec<PureState>,
}

impl EavesdropStrategy {
    pub fn new(povm: Povm, resend_states: Vec<PureState>) -> Result<Self> {
        if resend_states.len() != povm.len() {
            return Err(Error::LengthMismatch { expected: povm.len(), found: resend_states.len() });
        }
        for s in &resend_states {
            if s.dim() != povm.dim() {
                return Err(Error::DimensionMismatch { expected: povm.dim(), found: s.dim() });
            }
        }
        Ok(EavesdropStrategy { povm, resend_states })
    }
}

/// Feasible dual operator: `Tr(X psi psi*) >= g(psi psi*)` for every pure
/// state probed, with the worst probed slack recorded as `margin`.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub x: HermitianOp,
    pub margin: f64,
    pub probe_count: usize,
}

impl Certificate {
    pub fn upper_bound(&self) -> f64 {
        self.x.trace()
    }
}

/// Two-sided enclosure of the accessible fidelity.
#[derive(Clone, Debug)]
pub struct FidelityBracket {
    pub lower: f64,
    pub upper: f64,
    pub strategy: EavesdropStrategy,
    pub certificate: Certificate,
}

impl FidelityBracket {
    pub fn new(
        lower: f64,
        upper: f64,
        strategy: EavesdropStrategy,
        certificate: Certificate,
    ) -> Result<Self> {
        if !(0.0..=1.0 + 1e-9).contains(&lower) {
            return Err(Error::Numeric { what: "fidelity lower bound escaped [0, 1]" });
        }
        if lower > upper + 1e-8 {
            return Err(Error::Numeric { what: "weak duality violated: lower bound exceeds certificate trace" });
        }
        Ok(FidelityBracket { lower, upper, strategy, certificate })
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Knobs for the bracket computation; `Default` is the audited full-strength
/// setting, `light` trades tightness for speed in inner loops.
#[derive(Clone, Debug)]
pub struct FidelityConfig {
    /// POVM outcomes for the seesaw; `None` means `dim^2`.
    pub outcomes: Option<usize>,
    pub restarts: usize,
    pub max_outer: usize,
    pub dual_rounds: usize,
    pub verify_probes: usize,
    pub verify_ascents: usize,
    pub seed: u64,
}

impl Default for FidelityConfig {
    fn default() -> Self {
        FidelityConfig {
            outcomes: None,
            restarts: 16,
            max_outer: 80,
            dual_rounds: 40,
            verify_probes: 100_000,
            verify_ascents: 64,
            seed: 0,
        }
    }
}

impl FidelityConfig {
    pub fn with_seed(seed: u64) -> Self {
        FidelityConfig { seed, ..Self::default() }
    }

    /// Reduced-effort profile for use inside outer optimizations.
    pub fn light(seed: u64) -> Self {
        FidelityConfig {
            outcomes: None,
            restarts: 6,
            max_outer: 50,
            dual_rounds: 18,
            verify_probes: 20_000,
            verify_ascents: 16,
            seed,
        }
    }
}

/// Fidelity of a concrete intercept/resend attack:
/// `sum_i sum_b p_i <psi_i|E_b|psi_i> |<psi_i|phi_b>|^2`.
pub fn intercept_resend_fidelity(e: &Ensemble, s: &EavesdropStrategy) -> Result<f64> {
    if s.povm.dim() != e.dim() {
        return Err(Error::DimensionMismatch { expected: e.dim(), found: s.povm.dim() });
    }
    let mut total = 0.0;
    for (eb, phi_b) in s.povm.elements().iter().zip(&s.resend_states) {
        for (i, psi) in e.states().iter().enumerate() {
            let detect = eb.expectation(psi);
            let overlap = psi.fidelity_with(phi_b);
            total += e.weight(i) * detect * overlap;
        }
    }
    Ok(total)
}

/// `g(rho) = |Phi(rho)|`, the output norm of the ensemble map.
pub fn g_value(e: &Ensemble, rho: &HermitianOp) -> Result<f64> {
    if rho.dim() != e.dim() {
        return Err(Error::DimensionMismatch { expected: e.dim(), found: rho.dim() });
    }
    let phi = phi_from_ensemble(e);
    povm::operator_norm(&phi.apply(rho)?)
}

/// Weighted density operators `(alpha_b, sigma_b)` with average `I/d`.
#[derive(Clone, Debug)]
pub struct DensityEnsemble {
    pub weights: Vec<f64>,
    pub densities: Vec<HermitianOp>,
}

/// POVM to ensemble correspondence: `alpha_b = Tr(E_b)/d`,
/// `sigma_b = E_b/(d alpha_b)`; zero-trace elements are dropped.
pub fn povm_to_ensemble(p: &Povm) -> DensityEnsemble {
    let d = p.dim() as f64;
    let mut weights = Vec::new();
    let mut densities = Vec::new();
    for e in p.elements() {
        let t = e.trace();
        if t <= 1e-14 {
            continue;
        }
        weights.push(t / d);
        densities.push(e.scale(1.0 / t));
    }
    DensityEnsemble { weights, densities }
}

/// Output of the inner POVM optimization `max sum_b Tr(E_b A_b)`.
#[derive(Clone, Debug)]
pub struct DiscriminationOutcome {
    pub povm: Povm,
    pub value: f64,
    pub dual_y: HermitianOp,
    /// `Tr(dual_y) - value`; nonnegative up to eigensolver residuals.
    pub dual_gap: f64,
}

const DISC_GAP_TOL: f64 = 1e-8;
const DISC_MAX_ITERS: usize = 2000;

fn validate_discrimination_ops(ops: &[HermitianOp]) -> Result<usize> {
    let first = ops.first().ok_or(Error::Empty { what: "discrimination operator list" })?;
    let d = first.dim();
    let mut any_nonzero = false;
    for a in ops {
        if a.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: a.dim() });
        }
        let min = a.min_eigenvalue()?;
        if min < povm::POVM_PSD_TOL {
            return Err(Error::NotPositiveSemidefinite { min_eigenvalue: min });
        }
        if a.mat().max_abs_entry() > 0.0 {
            any_nonzero = true;
        }
    }
    if !any_nonzero {
        return Err(Error::Numeric { what: "discrimination requires a nonzero operator" });
    }
    Ok(d)
}

/// Best POVM for `sum_b Tr(E_b A_b)` with a matched dual upper bound.
/// Exact closed forms handle one operator, two operators (projector onto the
/// nonnegative eigenspace of the difference), and commuting families; the
/// general case runs the symmetrized fixed-point iteration.
pub fn discrimination_step(ops: &[HermitianOp]) -> Result<DiscriminationOutcome> {
    let d = validate_discrimination_ops(ops)?;
    match ops.len() {
        1 => {
            let y = ops[0].clone();
            let value = y.trace();
            Ok(DiscriminationOutcome {
                povm: Povm::trivial(d),
                value,
                dual_gap: y.trace() - value,
                dual_y: y,
            })
        }
        2 => helstrom(ops),
        _ => {
            if let Some(out) = commuting_assignment(ops)? {
                Ok(out)
            } else {
                discrimination_fixed_point(ops, DISC_GAP_TOL, DISC_MAX_ITERS)
            }
        }
    }
}

fn helstrom(ops: &[HermitianOp]) -> Result<DiscriminationOutcome> {
    let d = ops[0].dim();
    let diff = ops[0].sub(&ops[1]);
    let e = diff.eigh()?;
    let e1 = HermitianOp::symmetrized(e.apply_spectral(|lam| if lam >= 0.0 { 1.0 } else { 0.0 }))?;
    let e2 = HermitianOp::symmetrized(Mat::identity(d).sub(e1.mat()))?;
    let value = e1.trace_product(&ops[0]) + e2.trace_product(&ops[1]);
    let positive = HermitianOp::symmetrized(e.apply_spectral(|lam| lam.max(0.0)))?;
    let y = ops[1].add(&positive);
    let dual_gap = y.trace() - value;
    Ok(DiscriminationOutcome { povm: Povm::new(vec![e1, e2])?, value, dual_y: y, dual_gap })
}

/// Exact solution when the operators commute: measure in the common
/// eigenbasis and give each eigenvector to its best operator.
fn commuting_assignment(ops: &[HermitianOp]) -> Result<Option<DiscriminationOutcome>> {
    let d = ops[0].dim();
    let entry_scale = ops
        .iter()
        .map(|a| a.mat().max_abs_entry())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let comm_tol = 1e-12 * entry_scale * entry_scale;
    for a in 0..ops.len() {
        for b in (a + 1)..ops.len() {
            let ab = ops[a].mat().matmul(ops[b].mat());
            let ba = ops[b].mat().matmul(ops[a].mat());
            if ab.max_abs_diff(&ba) > comm_tol {
                return Ok(None);
            }
        }
    }
    // Mix with spread weights so a generic combination separates the shared
    // eigenspaces, then check the basis really diagonalizes every operator.
    let mut mix = Mat::zeros(d, d);
    for (b, a) in ops.iter().enumerate() {
        mix = mix.add(&a.mat().scale_re((2.0 + b as f64).lm_sqrt()));
    }
    let basis = eig::eigh(&mix.hermitize())?.vectors;
    let mut diag = vec![vec![0.0f64; d]; ops.len()];
    for (b, a) in ops.iter().enumerate() {
        let rotated = basis.adjoint().matmul(a.mat()).matmul(&basis);
        let mut off: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                if i == j {
                    diag[b][i] = rotated[(i, j)].re;
                } else {
                    off = off.max(cnorm(rotated[(i, j)]));
                }
            }
        }
        if off > 1e-10 * entry_scale.max(1.0) {
            return Ok(None);
        }
    }
    let mut elements = vec![Mat::zeros(d, d); ops.len()];
    let mut value = 0.0;
    let mut best_diag = vec![0.0f64; d];
    for i in 0..d {
        let mut best_b = 0;
        for b in 1..ops.len() {
            if diag[b][i] > diag[best_b][i] {
                best_b = b;
            }
        }
        let col: Vec<C64> = (0..d).map(|r| basis[(r, i)]).collect();
        elements[best_b] = elements[best_b].add(&Mat::outer(&col, &col));
        value += diag[best_b][i];
        best_diag[i] = diag[best_b][i];
    }
    let mut y = Mat::zeros(d, d);
    for i in 0..d {
        let col: Vec<C64> = (0..d).map(|r| basis[(r, i)]).collect();
        y = y.add(&Mat::outer(&col, &col).scale_re(best_diag[i]));
    }
    let y = HermitianOp::symmetrized(y)?;
    let dual_gap = y.trace() - value;
    let povm = Povm::new(
        elements.into_iter().map(HermitianOp::symmetrized).collect::<Result<Vec<_>>>()?,
    )?;
    Ok(Some(DiscriminationOutcome { povm, value, dual_y: y, dual_gap }))
}

/// Symmetrized fixed-point iteration
/// `E_b <- S (A_b E_b A_b) S`, `S = (sum_a A_a E_a A_a)^(-1/2)`,
/// with the renormalization deficiency redistributed uniformly so every
/// iterate is an exact POVM. Primal values and repaired dual bounds are
/// tracked across iterations; the best of each side is returned, so a
/// non-converged run still carries a valid bracket in `dual_gap`.
pub fn discrimination_fixed_point(
    ops: &[HermitianOp],
    gap_tol: f64,
    max_iters: usize,
) -> Result<DiscriminationOutcome> {
    let d = validate_discrimination_ops(ops)?;
    let count = ops.len();
    let uniform = 1.0 / count as f64;
    let mut elements: Vec<Mat> = vec![Mat::identity(d).scale_re(uniform); count];

    let mut best_value = f64::NEG_INFINITY;
    let mut best_elements = elements.clone();
    let mut best_y: Option<(Mat, f64)> = None;

    for _ in 0..max_iters {
        let value: f64 = elements
            .iter()
            .zip(ops)
            .map(|(e, a)| povm::trace_product(e, a.mat()))
            .sum();
        if value > best_value {
            best_value = value;
            best_elements = elements.clone();
        }

        // Dual candidate: symmetrize the stationarity operator and lift it
        // until it dominates every A_b.
        let mut y = Mat::zeros(d, d);
        for (e, a) in elements.iter().zip(ops) {
            y = y.add(&e.matmul(a.mat())).add(&a.mat().matmul(e));
        }
        let y = y.scale_re(0.5).hermitize();
        let mut lift = f64::NEG_INFINITY;
        for a in ops {
            lift = lift.max(eig::lambda_max(&a.mat().sub(&y))?);
        }
        let y_feasible =
            if lift > 0.0 { y.add(&Mat::identity(d).scale_re(lift)) } else { y };
        let trace_y = y_feasible.trace().re;
        if best_y.as_ref().map(|(_, t)| trace_y < *t).unwrap_or(true) {
            best_y = Some((y_feasible, trace_y));
        }
        if best_y.as_ref().unwrap().1 - best_value < gap_tol {
            break;
        }

        // Fixed-point update.
        let sandwiches: Vec<Mat> = elements
            .iter()
            .zip(ops)
            .map(|(e, a)| a.mat().matmul(e).matmul(a.mat()).hermitize())
            .collect();
        let mut lambda = Mat::zeros(d, d);
        for s in &sandwiches {
            lambda = lambda.add(s);
        }
        let decomp = eig::eigh(&lambda.hermitize())?;
        let delta = decomp.values[0].max(0.0) * 1e-12 + 1e-300;
        let s = decomp.apply_spectral(|lam| 1.0 / (lam.max(0.0) + delta).lm_sqrt());
        let renormalized: Vec<Mat> =
            sandwiches.iter().map(|m| s.matmul(m).matmul(&s).hermitize()).collect();
        let mut total = Mat::zeros(d, d);
        for m in &renormalized {
            total = total.add(m);
        }
        // The spectral clamp makes I - total PSD, so the uniform top-up
        // keeps every element PSD while restoring completeness.
        let correction = Mat::identity(d).sub(&total).scale_re(uniform).hermitize();
        elements = renormalized.into_iter().map(|m| m.add(&correction)).collect();
    }

    let (y, trace_y) = best_y.expect("at least one iteration ran");
    let povm = Povm::new(
        best_elements.into_iter().map(HermitianOp::symmetrized).collect::<Result<Vec<_>>>()?,
    )?;
    Ok(DiscriminationOutcome {
        povm,
        value: best_value,
        dual_y: HermitianOp::symmetrized(y)?,
        dual_gap: trace_y - best_value,
    })
}

fn identity_padded_povm(dim: usize, outcomes: usize) -> Povm {
    let mut elements = vec![HermitianOp::identity(dim)];
    elements.extend((1..outcomes).map(|_| HermitianOp::zero(dim)));
    Povm::new(elements).expect("identity plus zeros is a POVM")
}

/// One seesaw run from a fixed starting POVM. Alternates the exact resend
/// update (dominating eigenvectors) with the discrimination step under a
/// keep-better rule, so the objective never decreases.
fn seesaw_once(
    e: &Ensemble,
    phi: &CpMap,
    mut current: Povm,
    max_outer: usize,
) -> Result<(f64, EavesdropStrategy)> {
    let n = e.len();
    let mut value = f64::NEG_INFINITY;
    let mut stall = 0;
    for _ in 0..max_outer {
        let mut iter_value = 0.0;
        let mut resends = Vec::with_capacity(current.len());
        for (b, eb) in current.elements().iter().enumerate() {
            let out = phi.apply(eb)?;
            let (lam, vec) = povm::dominating_eigenvector(&out)?;
            // Outcomes with no mass get signal states as placeholder
            // resends; this steers restarts out of degenerate traps.
            resends.push(if lam <= 1e-14 { e.state(b % n).clone() } else { vec });
            iter_value += lam.max(0.0);
        }
        let improved = iter_value - value.max(0.0);
        if iter_value > value {
            value = iter_value;
        }
        if improved < 1e-12 * value.abs().max(1.0) {
            stall += 1;
            if stall >= 2 {
                break;
            }
        } else {
            stall = 0;
        }
        let targets: Vec<HermitianOp> = resends
            .iter()
            .map(|s| phi.apply(&HermitianOp::from_projector(s)))
            .collect::<Result<Vec<_>>>()?;
        let disc = discrimination_step(&targets)?;
        let incumbent: f64 = current
            .elements()
            .iter()
            .zip(&targets)
            .map(|(eb, ab)| eb.trace_product(ab))
            .sum();
        if disc.value > incumbent {
            current = disc.povm;
        }
    }
    // Refresh the resends against the final POVM so the reported value and
    // the returned strategy evaluate identically.
    let mut final_value = 0.0;
    let mut resends = Vec::with_capacity(current.len());
    for (b, eb) in current.elements().iter().enumerate() {
        let out = phi.apply(eb)?;
        let (lam, vec) = povm::dominating_eigenvector(&out)?;
        resends.push(if lam <= 1e-14 { e.state(b % n).clone() } else { vec });
        final_value += lam.max(0.0);
    }
    Ok((final_value, EavesdropStrategy::new(current, resends)?))
}

/// Multistart seesaw lower bound. Restart 0 always begins from the
/// identity-padded POVM, whose second iterate already separates orthogonal
/// ensembles exactly; later restarts draw random POVMs from per-restart
/// streams of the seed.
pub fn accessible_fidelity_seesaw(
    e: &Ensemble,
    outcomes: usize,
    restarts: usize,
    seed: u64,
) -> Result<(f64, EavesdropStrategy)> {
    seesaw_with(e, &phi_from_ensemble(e), outcomes, restarts, 80, seed)
}

pub(crate) fn seesaw_with(
    e: &Ensemble,
    phi: &CpMap,
    outcomes: usize,
    restarts: usize,
    max_outer: usize,
    seed: u64,
) -> Result<(f64, EavesdropStrategy)> {
    assert!(outcomes >= 1 && restarts >= 1);
    let mut best: Option<(f64, EavesdropStrategy)> = None;
    for r in 0..restarts {
        let start = if r == 0 {
            identity_padded_povm(e.dim(), outcomes)
        } else {
            let mut rng = sample::rng_stream(seed, r as u64);
            sample::random_povm_rng(e.dim(), outcomes, &mut rng)
        };
        let run = seesaw_once(e, phi, start, max_outer)?;
        if best.as_ref().map(|(v, _)| run.0 > *v).unwrap_or(true) {
            best = Some(run);
        }
    }
    Ok(best.expect("restarts >= 1"))
}

pub(crate) fn seesaw_from_start(
    e: &Ensemble,
    phi: &CpMap,
    start: Povm,
    max_outer: usize,
) -> Result<(f64, EavesdropStrategy)> {
    seesaw_once(e, phi, start, max_outer)
}

// --- dual certificate machinery ---

const SEPARATION_TOL: f64 = 1e-8;

/// Real coordinates for Hermitian matrices: `d` diagonal entries, then
/// (re, im) for each upper-triangle pair in lexicographic order.
fn coords_to_mat(d: usize, x: &[f64]) -> Mat {
    let mut m = Mat::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = C64::new(x[i], 0.0);
    }
    let mut k = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let z = C64::new(x[k], x[k + 1]);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    m
}

fn mat_to_coords(m: &Mat) -> Vec<f64> {
    let d = m.rows();
    let mut x = vec![0.0; d * d];
    for i in 0..d {
        x[i] = m[(i, i)].re;
    }
    let mut k = d;
    for i in 0..d {
        for j in (i + 1)..d {
            x[k] = m[(i, j)].re;
            x[k + 1] = m[(i, j)].im;
            k += 2;
        }
    }
    x
}

/// Coefficients of `psi* X psi` in the coordinate basis.
fn constraint_coefficients(psi: &[C64]) -> Vec<f64> {
    let d = psi.len();
    let mut a = vec![0.0; d * d];
    for i in 0..d {
        a[i] = psi[i].norm_sqr();
    }
    let mut k = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let z = psi[i].conj() * psi[j];
            a[k] = 2.0 * z.re;
            a[k + 1] = -2.0 * z.im;
            k += 2;
        }
    }
    a
}

/// Basis operator `k` of the coordinate map.
fn basis_op(d: usize, k: usize) -> Mat {
    let mut x = vec![0.0; d * d];
    x[k] = 1.0;
    coords_to_mat(d, &x)
}

/// Solve the SPD system `H y = rhs` in place by Cholesky.
fn solve_spd(h: &mut [f64], n: usize, rhs: &mut [f64]) -> Result<()> {
    for k in 0..n {
        h[k * n + k] += 1e-12 * (1.0 + h[k * n + k].abs());
    }
    for k in 0..n {
        let mut diag = h[k * n + k];
        for m in 0..k {
            diag -= h[k * n + m] * h[k * n + m];
        }
        if diag <= 0.0 {
            return Err(Error::Numeric { what: "barrier Hessian lost positive definiteness" });
        }
        let diag = diag.lm_sqrt();
        h[k * n + k] = diag;
        for i in (k + 1)..n {
            let mut v = h[i * n + k];
            for m in 0..k {
                v -= h[i * n + m] * h[k * n + m];
            }
            h[i * n + k] = v / diag;
        }
    }
    for i in 0..n {
        let mut v = rhs[i];
        for m in 0..i {
            v -= h[i * n + m] * rhs[m];
        }
        rhs[i] = v / h[i * n + i];
    }
    for i in (0..n).rev() {
        let mut v = rhs[i];
        for m in (i + 1)..n {
            v -= h[m * n + i] * rhs[m];
        }
        rhs[i] = v / h[i * n + i];
    }
    Ok(())
}

struct Probe {
    coeffs: Vec<f64>,
    g: f64,
}

/// Interior-point solve of `min Tr X` over the finite constraint set
/// `psi* X psi >= g_psi` plus `X > 0` (implied by the full problem and
/// needed to keep the finite relaxation bounded).
fn solve_finite_relaxation(d: usize, probes: &[Probe], x_init: &Mat) -> Result<Mat> {
    let n = d * d;
    let basis: Vec<Mat> = (0..n).map(|k| basis_op(d, k)).collect();
    let mut x = mat_to_coords(x_init);

    let slacks = |x: &[f64]| -> Vec<f64> {
        probes
            .iter()
            .map(|p| p.coeffs.iter().zip(x).map(|(a, xv)| a * xv).sum::<f64>() - p.g)
            .collect()
    };
    let eigvals = |x: &[f64]| eig::eigvalsh(&coords_to_mat(d, x));

    // Inflate until strictly interior; adding c*I raises every slack by c.
    let mut bump = 0.0f64;
    {
        let s = slacks(&x);
        let min_s = s.iter().cloned().fold(f64::INFINITY, f64::min);
        let min_e = *eigvals(&x)?.last().expect("nonempty");
        let need = (1e-6 - min_s.min(min_e)).max(0.0);
        if need > 0.0 {
            bump = need;
        }
    }
    if bump > 0.0 {
        for i in 0..d {
            x[i] += bump;
        }
    }

    let barrier_value = |x: &[f64], mu: f64| -> Result<f64> {
        let trace: f64 = (0..d).map(|i| x[i]).sum();
        let mut v = trace;
        for s in slacks(x) {
            if s <= 0.0 {
                return Ok(f64::INFINITY);
            }
            v -= mu * s.lm_ln();
        }
        for lam in eigvals(x)? {
            if lam <= 0.0 {
                return Ok(f64::INFINITY);
            }
            v -= mu * lam.lm_ln();
        }
        Ok(v)
    };

    let mut mu = 0.1;
    while mu > 1e-9 {
        for _ in 0..40 {
            let xm = coords_to_mat(d, &x);
            let decomp = eig::eigh(&xm)?;
            if *decomp.values.last().unwrap() <= 0.0 {
                return Err(Error::Numeric { what: "barrier iterate left the PSD cone" });
            }
            let w = decomp.apply_spectral(|lam| 1.0 / lam);
            let wb: Vec<Mat> = basis.iter().map(|b| w.matmul(b)).collect();
            let s = slacks(&x);

            let mut grad = vec![0.0; n];
            for i in 0..d {
                grad[i] = 1.0;
            }
            for (p, sv) in probes.iter().zip(&s) {
                for k in 0..n {
                    grad[k] -= mu * p.coeffs[k] / sv;
                }
            }
            for k in 0..n {
                grad[k] -= mu * wb[k].trace().re;
            }

            let mut hess = vec![0.0; n * n];
            for (p, sv) in probes.iter().zip(&s) {
                let w2 = mu / (sv * sv);
                for k in 0..n {
                    for l in k..n {
                        hess[k * n + l] += w2 * p.coeffs[k] * p.coeffs[l];
                    }
                }
            }
            for k in 0..n {
                for l in k..n {
                    hess[k * n + l] += mu * mat::trace_mul(&wb[k], &wb[l]).re;
                }
            }
            for k in 0..n {
                for l in 0..k {
                    hess[k * n + l] = hess[l * n + k];
                }
            }

            let mut step = grad.iter().map(|g| -g).collect::<Vec<f64>>();
            solve_spd(&mut hess, n, &mut step)?;
            let decrement: f64 = grad.iter().zip(&step).map(|(g, s)| -g * s).sum();
            if decrement < 1e-13 {
                break;
            }
            let h0 = barrier_value(&x, mu)?;
            let mut t = 1.0;
            let mut moved = false;
            for _ in 0..60 {
                let cand: Vec<f64> =
                    x.iter().zip(&step).map(|(xv, sv)| xv + t * sv).collect();
                let hc = barrier_value(&cand, mu)?;
                if hc < h0 - 1e-4 * t * decrement {
                    x = cand;
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            if !moved {
                break;
            }
        }
        mu *= 0.2;
    }
    Ok(coords_to_mat(d, &x))
}

/// Maximize `g(psi psi*) - psi* X psi`; returns up to three distinct
/// violators above the separation tolerance, best first.
fn separation(
    phi: &CpMap,
    x: &Mat,
    seed: u64,
) -> Result<Vec<(f64, PureState)>> {
    let d = phi.in_dim();
    let mut found: Vec<(f64, PureState)> = Vec::new();
    let consider = |viol: f64, psi: PureState, found: &mut Vec<(f64, PureState)>| {
        if viol <= SEPARATION_TOL {
            return;
        }
        if found.iter().any(|(_, s)| s.fidelity_with(&psi) > 1.0 - 1e-6) {
            return;
        }
        found.push((viol, psi));
    };
    for k in 0..8u64 {
        let mut rng = sample::rng_stream(seed, k);
        let start = sample::random_pure_state_rng(d, &mut rng);
        let (viol, psi) = ascend_quadratic_gap(phi, Some(x), start.amplitudes())?;
        consider(viol, PureState::new(psi)?, &mut found);
    }
    if d == 2 {
        // Coarse sweep, then polish the best grid point.
        let mut best = f64::NEG_INFINITY;
        let mut best_psi = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        for j in 0..60 {
            let theta = core::f64::consts::PI * (j as f64 + 0.5) / 60.0;
            let ct = (theta / 2.0).lm_cos();
            let st = (theta / 2.0).lm_sin();
            for k in 0..120 {
                let phase = 2.0 * core::f64::consts::PI * k as f64 / 120.0;
                let psi = [C64::new(ct, 0.0), from_polar(st, phase)];
                let lam = eig::lambda_max(&phi.apply_mat(&Mat::outer(&psi, &psi)))?;
                let viol = lam - x.quadratic_form(&psi).re;
                if viol > best {
                    best = viol;
                    best_psi = vec![psi[0], psi[1]];
                }
            }
        }
        let (viol, psi) = ascend_quadratic_gap(phi, Some(x), &best_psi)?;
        if viol >= best {
            consider(viol, PureState::new(psi)?, &mut found);
        } else {
            consider(best, PureState::new(best_psi)?, &mut found);
        }
    }
    found.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    found.truncate(3);
    Ok(found)
}

/// Worst feasibility slack of `X` over random probes, a full qubit grid
/// when applicable, and ascent attacks; also counts the probes used.
fn verify_margin(
    phi: &CpMap,
    x: &Mat,
    probes: usize,
    ascents: usize,
    seed: u64,
) -> Result<(f64, usize)> {
    let d = phi.in_dim();
    let mut margin = f64::INFINITY;
    let mut count = 0usize;
    let mut rng = sample::rng_stream(seed, 0);
    for _ in 0..probes {
        let psi = sample::random_pure_state_rng(d, &mut rng);
        let lam = eig::lambda_max(&phi.apply_mat(&psi.projector()))?;
        margin = margin.min(x.quadratic_form(psi.amplitudes()).re - lam);
        count += 1;
    }
    if d == 2 {
        for j in 0..180 {
            let theta = core::f64::consts::PI * (j as f64 + 0.5) / 180.0;
            let ct = (theta / 2.0).lm_cos();
            let st = (theta / 2.0).lm_sin();
            for k in 0..360 {
                let phase = 2.0 * core::f64::consts::PI * k as f64 / 360.0;
                let psi = [C64::new(ct, 0.0), from_polar(st, phase)];
                let lam = eig::lambda_max(&phi.apply_mat(&Mat::outer(&psi, &psi)))?;
                margin = margin.min(x.quadratic_form(&psi).re - lam);
                count += 1;
            }
        }
    }
    for a in 0..ascents {
        let mut rng = sample::rng_stream(seed, 1_000 + a as u64);
        let start = sample::random_pure_state_rng(d, &mut rng);
        let (viol, _) = ascend_quadratic_gap(phi, Some(x), start.amplitudes())?;
        margin = margin.min(-viol);
        count += 1;
    }
    Ok((margin, count))
}

/// Verify a candidate, inflating by any violation found so the returned
/// operator is feasible for everything probed; the recorded margin always
/// comes from the final verification pass.
fn finalize_certificate(
    phi: &CpMap,
    x: Mat,
    probes: usize,
    ascents: usize,
    seed: u64,
) -> Result<Certificate> {
    let d = phi.in_dim();
    let mut x = x;
    let mut margin = f64::NEG_INFINITY;
    let mut total = 0usize;
    for attempt in 0..3u64 {
        let (m, count) = verify_margin(phi, &x, probes, ascents, sample::derive_seed(seed, attempt))?;
        margin = m;
        total += count;
        if m >= 0.0 {
            break;
        }
        if attempt < 2 {
            x = x.add(&Mat::identity(d).scale_re(-m + 1e-12));
        }
    }
    let mut op = HermitianOp::symmetrized(x)?;
    if op.min_eigenvalue()? <= 0.0 {
        op = HermitianOp::symmetrized(op.mat().add(&Mat::identity(d).scale_re(1e-12)))?;
    }
    Ok(Certificate { x: op, margin, probe_count: total })
}

pub(crate) fn spanning_rank(e: &Ensemble) -> Result<usize> {
    let d = e.dim();
    let mut gram_sum = Mat::zeros(d, d);
    for s in e.states() {
        gram_sum = gram_sum.add(&s.projector());
    }
    let vals = eig::eigvalsh(&gram_sum)?;
    Ok(vals.iter().filter(|&&v| v > 1e-10).count())
}

pub(crate) fn ensure_spanning(e: &Ensemble) -> Result<()> {
    let rank = spanning_rank(e)?;
    if rank < e.dim() {
        return Err(Error::NonSpanningStates { rank, dim: e.dim() });
    }
    Ok(())
}

/// Scalar fallback certificate `X = nu_inf(Phi) I`, verified and inflated
/// like every other candidate. Always constructible for spanning ensembles.
pub fn scalar_certificate(e: &Ensemble, restarts: usize, seed: u64) -> Result<Certificate> {
    ensure_spanning(e)?;
    let phi = phi_from_ensemble(e);
    let nu = nu_infinity(&phi, restarts, sample::derive_seed(seed, 11))?.value;
    let x = Mat::identity(e.dim()).scale_re(nu * (1.0 + 1e-6) + 1e-9);
    finalize_certificate(&phi, x, 20_000, 16, sample::derive_seed(seed, 12))
}

/// Exchange-method search for a low-trace feasible certificate.
///
/// The average signal operator `sum_i p_i P_i` plus a sliver of identity is
/// feasible outright (triangle inequality on the output terms), and serves
/// as both the interior starting point and a fallback candidate. The loop
/// alternates an interior-point solve of the finite relaxation with a
/// separation search for violated pure states.
pub fn dual_certificate_search(e: &Ensemble, max_rounds: usize, seed: u64) -> Result<Certificate> {
    dual_certificate_search_with(e, max_rounds, 100_000, 64, seed)
}

pub fn dual_certificate_search_with(
    e: &Ensemble,
    max_rounds: usize,
    verify_probes: usize,
    verify_ascents: usize,
    seed: u64,
) -> Result<Certificate> {
    ensure_spanning(e)?;
    let d = e.dim();
    let phi = phi_from_ensemble(e);
    let average = phi.apply_mat(&Mat::identity(d));

    let g_of = |psi: &PureState| -> Result<f64> {
        eig::lambda_max(&phi.apply_mat(&psi.projector()))
    };
    let mut probes: Vec<Probe> = Vec::new();
    let add_probe = |psi: &PureState, probes: &mut Vec<Probe>| -> Result<()> {
        probes.push(Probe { coeffs: constraint_coefficients(psi.amplitudes()), g: g_of(psi)? });
        Ok(())
    };
    for s in e.states() {
        add_probe(s, &mut probes)?;
    }
    for k in 0..d {
        add_probe(&PureState::basis(d, k), &mut probes)?;
    }
    let mut rng = sample::rng_stream(sample::derive_seed(seed, 21), 0);
    for _ in 0..4 {
        add_probe(&sample::random_pure_state_rng(d, &mut rng), &mut probes)?;
    }

    let mut x = average.add(&Mat::identity(d).scale_re(1e-6));
    let mut last_violation = 0.0f64;
    for round in 0..max_rounds {
        x = solve_finite_relaxation(d, &probes, &x)?;
        let violators = separation(&phi, &x, sample::derive_seed(seed, 100 + round as u64))?;
        match violators.first() {
            None => {
                last_violation = 0.0;
                break;
            }
            Some((v, _)) => {
                last_violation = *v;
                for (_, psi) in &violators {
                    add_probe(psi, &mut probes)?;
                }
            }
        }
    }
    if last_violation > 0.0 {
        x = x.add(&Mat::identity(d).scale_re(last_violation));
    }

    let solver_cert = finalize_certificate(
        &phi,
        x,
        verify_probes,
        verify_ascents,
        sample::derive_seed(seed, 7),
    )?;
    // The ensemble average is analytically feasible with margin >= 0, so it
    // enters unshifted; finalize inflates only if probing disagrees.
    let fallback_cert = finalize_certificate(
        &phi,
        average,
        verify_probes,
        verify_ascents,
        sample::derive_seed(seed, 8),
    )?;

    let solver_ok = solver_cert.margin >= -1e-9;
    let fallback_ok = fallback_cert.margin >= -1e-9;
    Ok(match (solver_ok, fallback_ok) {
        (true, true) => {
            if solver_cert.upper_bound() <= fallback_cert.upper_bound() {
                solver_cert
            } else {
                fallback_cert
            }
        }
        (true, false) => solver_cert,
        (false, true) => fallback_cert,
        (false, false) => {
            if solver_cert.margin >= fallback_cert.margin {
                solver_cert
            } else {
                fallback_cert
            }
        }
    })
}

/// Two-sided accessible fidelity: seesaw lower bound (defaulting to `d^2`
/// outcomes) and dual certificate upper bound.
pub fn accessible_fidelity(e: &Ensemble, config: &FidelityConfig) -> Result<FidelityBracket> {
    ensure_spanning(e)?;
    let outcomes = config.outcomes.unwrap_or(e.dim() * e.dim());
    let phi = phi_from_ensemble(e);
    let (lower, strategy) = seesaw_with(
        e,
        &phi,
        outcomes,
        config.restarts,
        config.max_outer,
        sample::derive_seed(config.seed, 1),
    )?;
    let certificate = dual_certificate_search_with(
        e,
        config.dual_rounds,
        config.verify_probes,
        config.verify_ascents,
        sample::derive_seed(config.seed, 2),
    )?;
    let upper = certificate.upper_bound();
    FidelityBracket::new(lower, upper, strategy, certificate)
}

/// Exhaustive two-stage grid oracle for two-state qubit ensembles: sweep
/// both resend states over the Bloch sphere (3 degree mesh, then 1 degree
/// refinement around the leaders) and solve each two-outcome measurement in
/// closed form. Matches a full 1 degree enumeration to grid accuracy.
pub fn pair_resend_grid_oracle(e: &Ensemble) -> Result<f64> {
    if e.dim() != 2 || e.len() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: e.dim().max(e.len()) });
    }
    let p1 = e.weight(0);
    let p2 = e.weight(1);
    let psi1 = e.state(0).clone();
    let psi2 = e.state(1).clone();
    let cross = psi1.fidelity_with(&psi2);

    // For resend phi: a_i(phi) = p_i |<psi_i|phi>|^2. The measured operators
    // are A_b = a_1(phi_b) P_1 + a_2(phi_b) P_2, and the two-outcome optimum
    // is Tr A_2 + (positive eigenvalues of A_1 - A_2), available in closed
    // form because A_1 - A_2 = alpha P_1 + beta P_2 has
    // det = alpha beta (1 - cross).
    let weight_pair = |theta: f64, phase: f64| -> (f64, f64) {
        let ct = (theta / 2.0).lm_cos();
        let st = (theta / 2.0).lm_sin();
        let phi = [C64::new(ct, 0.0), from_polar(st, phase)];
        let o1 = mat::inner(psi1.amplitudes(), &phi).norm_sqr();
        let o2 = mat::inner(psi2.amplitudes(), &phi).norm_sqr();
        (p1 * o1, p2 * o2)
    };
    let pair_value = |w1: (f64, f64), w2: (f64, f64)| -> f64 {
        let alpha = w1.0 - w2.0;
        let beta = w1.1 - w2.1;
        let trace2 = w2.0 + w2.1;
        let sum = alpha + beta;
        let det = alpha * beta * (1.0 - cross);
        let disc = (sum * sum - 4.0 * det).max(0.0).lm_sqrt();
        let lam1 = 0.5 * (sum + disc);
        let lam2 = 0.5 * (sum - disc);
        trace2 + lam1.max(0.0) + lam2.max(0.0)
    };

    // Coarse stage: full sphere at 3 degrees.
    let theta_steps = 60;
    let phase_steps = 120;
    let mut grid: Vec<((f64, f64), (f64, f64))> = Vec::with_capacity(theta_steps * phase_steps);
    for j in 0..theta_steps {
        let theta = core::f64::consts::PI * (j as f64 + 0.5) / theta_steps as f64;
        for k in 0..phase_steps {
            let phase = 2.0 * core::f64::consts::PI * k as f64 / phase_steps as f64;
            grid.push(((theta, phase), weight_pair(theta, phase)));
        }
    }
    let mut leaders: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..grid.len() {
        for j in 0..grid.len() {
            let v = pair_value(grid[i].1, grid[j].1);
            if leaders.len() < 50 {
                leaders.push((v, i, j));
                if leaders.len() == 50 {
                    leaders.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
                }
            } else if v > leaders[49].0 {
                leaders[49] = (v, i, j);
                leaders.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
            }
        }
    }

    // Refinement: 1 degree mesh in a +-3 degree window around each leader.
    let deg = core::f64::consts::PI / 180.0;
    let mut best = leaders.first().map(|l| l.0).unwrap_or(f64::NEG_INFINITY);
    for &(_, i, j) in &leaders {
        let (c1, _) = grid[i];
        let (c2, _) = grid[j];
        let mut fine1 = Vec::new();
        let mut fine2 = Vec::new();
        for da in -3..=3 {
            for db in -3..=3 {
                let t1 = (c1.0 + da as f64 * deg).clamp(0.0, core::f64::consts::PI);
                let q1 = c1.1 + db as f64 * deg;
                fine1.push(weight_pair(t1, q1));
                let t2 = (c2.0 + da as f64 * deg).clamp(0.0, core::f64::consts::PI);
                let q2 = c2.1 + db as f64 * deg;
                fine2.push(weight_pair(t2, q2));
            }
        }
        for w1 in &fine1 {
            for w2 in &fine2 {
                let v = pair_value(*w1, *w2);
                if v > best {
                    best = v;
                }
            }
        }
    }
    Ok(best)
}
