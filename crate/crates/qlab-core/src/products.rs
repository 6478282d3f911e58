//! Tensor-product constructions and executable verification of the
//! multiplicativity statements: product ensembles, feasibility of tensor
//! certificates, and the two-stage composite measurement whose value chains
//! the product fidelity down to the product of factor fidelities.

use alloc::vec;
use alloc::vec::Vec;

use crate::channel::{ascend_quadratic_gap, nu_infinity, phi_from_ensemble, tensor_maps, CpMap};
use crate::eig;
use crate::ensemble::{Ensemble, JointDistribution};
use crate::error::{Error, Result};
use crate::fidelity::{
    seesaw_from_start, seesaw_with, Certificate, EavesdropStrategy, FidelityBracket,
    FidelityConfig, accessible_fidelity,
};
use crate::povm::{self, HermitianOp, Povm};
use crate::quantumness::{quantumness, QuantumnessConfig, QuantumnessReport};
use crate::sample;
use crate::state::PureState;

/// Ensemble with weights `p_i q_j` and states `psi_i (x) theta_j`, ordered
/// row-major in (i, j).
pub fn product_ensemble(e1: &Ensemble, e2: &Ensemble) -> Ensemble {
    let mut weights = Vec::with_capacity(e1.len() * e2.len());
    let mut states = Vec::with_capacity(e1.len() * e2.len());
    for (i, s1) in e1.states().iter().enumerate() {
        for (j, s2) in e2.states().iter().enumerate() {
            weights.push(e1.weight(i) * e2.weight(j));
            states.push(s1.tensor(s2));
        }
    }
    Ensemble::new(weights, states).expect("product of distributions is a distribution")
}

/// Ensemble `{p_ij, psi_i (x) theta_j}` for a general joint distribution,
/// row-major in (i, j).
pub fn joint_ensemble(
    p: &JointDistribution,
    states1: &[PureState],
    states2: &[PureState],
) -> Result<Ensemble> {
    if p.rows() != states1.len() {
        return Err(Error::LengthMismatch { expected: p.rows(), found: states1.len() });
    }
    if p.cols() != states2.len() {
        return Err(Error::LengthMismatch { expected: p.cols(), found: states2.len() });
    }
    let mut weights = Vec::with_capacity(states1.len() * states2.len());
    let mut states = Vec::with_capacity(states1.len() * states2.len());
    for (i, s1) in states1.iter().enumerate() {
        for (j, s2) in states2.iter().enumerate() {
            weights.push(p.prob(i, j));
            states.push(s1.tensor(s2));
        }
    }
    Ensemble::new(weights, states)
}

/// Product of two strategies: POVM `E_b (x) F_c`, resends
/// `phi_b (x) chi_c`, row-major in (b, c). Its fidelity on a product
/// ensemble factorizes exactly.
pub fn product_strategy(
    s1: &EavesdropStrategy,
    s2: &EavesdropStrategy,
) -> Result<EavesdropStrategy> {
    let mut elements = Vec::with_capacity(s1.povm.len() * s2.povm.len());
    let mut resends = Vec::with_capacity(s1.povm.len() * s2.povm.len());
    for (e1, phi1) in s1.povm.elements().iter().zip(&s1.resend_states) {
        for (e2, phi2) in s2.povm.elements().iter().zip(&s2.resend_states) {
            elements.push(povm::tensor(e1, e2));
            resends.push(phi1.tensor(phi2));
        }
    }
    EavesdropStrategy::new(Povm::new(elements)?, resends)
}

/// Probe audit of the tensor of two feasible certificates.
#[derive(Clone, Debug)]
pub struct ProductFeasibilityReport {
    /// Maximal output norms of the renormalized maps
    /// `rho -> Phi_i(X_i^{-1/2} rho X_i^{-1/2})`; at most 1 when the
    /// certificate is feasible.
    pub nu_omega_1: f64,
    pub nu_omega_2: f64,
    /// Worst value of `Tr[(X1 (x) X2) rho] - |(Phi1 (x) Phi2)(rho)|` over
    /// all probed bipartite pure states.
    pub worst_margin: f64,
    pub probes_used: usize,
    pub holds: bool,
}

const CERT_MARGIN_TOL: f64 = -1e-7;

fn renormalized_map(e: &Ensemble, cert: &Certificate) -> Result<CpMap> {
    let s = povm::inv_sqrt(&cert.x)?;
    let pairs = e
        .states()
        .iter()
        .enumerate()
        .map(|(i, psi)| {
            let proj = psi.projector();
            let sandwich = s.mat().matmul(&proj).matmul(s.mat()).scale_re(e.weight(i));
            Ok((HermitianOp::from_projector(psi), HermitianOp::symmetrized(sandwich)?))
        })
        .collect::<Result<Vec<_>>>()?;
    CpMap::holevo(e.dim(), e.dim(), pairs)
}

/// Check that `X1 (x) X2` stays feasible for the product ensemble: the
/// renormalized factor maps must have maximal output norm at most 1, and
/// probed bipartite states must respect the tensor constraint.
pub fn check_feasible_product(
    e1: &Ensemble,
    e2: &Ensemble,
    c1: &Certificate,
    c2: &Certificate,
    probes: usize,
    seed: u64,
) -> Result<ProductFeasibilityReport> {
    for c in [c1, c2] {
        if c.margin < CERT_MARGIN_TOL {
            return Err(Error::InfeasibleCertificate { margin: c.margin });
        }
        let min = c.x.min_eigenvalue()?;
        if min <= 0.0 {
            return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
        }
    }

    let omega1 = renormalized_map(e1, c1)?;
    let omega2 = renormalized_map(e2, c2)?;
    let nu_omega_1 = nu_infinity(&omega1, 32, sample::derive_seed(seed, 1))?.value;
    let nu_omega_2 = nu_infinity(&omega2, 32, sample::derive_seed(seed, 2))?.value;

    let phi12 = tensor_maps(&phi_from_ensemble(e1), &phi_from_ensemble(e2))?;
    let shift = c1.x.mat().kron(c2.x.mat());
    let d12 = e1.dim() * e2.dim();
    let mut worst = f64::INFINITY;
    let mut rng = sample::rng_stream(sample::derive_seed(seed, 3), 0);
    for _ in 0..probes {
        let psi = sample::random_pure_state_rng(d12, &mut rng);
        let lam = eig::lambda_max(&phi12.apply_mat(&psi.projector()))?;
        worst = worst.min(shift.quadratic_form(psi.amplitudes()).re - lam);
    }
    let ascents = 64usize;
    for a in 0..ascents {
        let mut rng = sample::rng_stream(sample::derive_seed(seed, 4), a as u64);
        let start = sample::random_pure_state_rng(d12, &mut rng);
        let (viol, _) = ascend_quadratic_gap(&phi12, Some(&shift), start.amplitudes())?;
        worst = worst.min(-viol);
    }

    let holds =
        nu_omega_1 <= 1.0 + 1e-6 && nu_omega_2 <= 1.0 + 1e-6 && worst >= CERT_MARGIN_TOL;
    Ok(ProductFeasibilityReport {
        nu_omega_1,
        nu_omega_2,
        worst_margin: worst,
        probes_used: probes + ascents,
        holds,
    })
}

/// Two-sided multiplicativity check for a pair of ensembles.
#[derive(Clone, Debug)]
pub struct Thm1Report {
    pub f1: FidelityBracket,
    pub f2: FidelityBracket,
    /// Product seesaw on the product ensemble, warm-started from the tensor
    /// of the factor strategies.
    pub f12_lower: f64,
    /// `Tr(X1) Tr(X2)`: the tensor-certificate route.
    pub f12_upper: f64,
    pub consistent: bool,
}

/// Bracket both factors, bracket the product, and test that the product
/// interval intersects the product of factor intervals within 5e-3.
pub fn verify_thm1(e1: &Ensemble, e2: &Ensemble, config: &FidelityConfig) -> Result<Thm1Report> {
    let mut cfg1 = config.clone();
    cfg1.seed = sample::derive_seed(config.seed, 1);
    let f1 = accessible_fidelity(e1, &cfg1)?;
    let mut cfg2 = config.clone();
    cfg2.seed = sample::derive_seed(config.seed, 2);
    let f2 = accessible_fidelity(e2, &cfg2)?;

    let e12 = product_ensemble(e1, e2);
    let phi12 = phi_from_ensemble(&e12);
    let warm = product_strategy(&f1.strategy, &f2.strategy)?;
    let (warm_value, _) = seesaw_from_start(&e12, &phi12, warm.povm, config.max_outer)?;
    let (cold_value, _) = seesaw_with(
        &e12,
        &phi12,
        e12.dim() * e12.dim(),
        config.restarts.min(4).max(1),
        config.max_outer,
        sample::derive_seed(config.seed, 3),
    )?;
    let f12_lower = warm_value.max(cold_value);
    if f12_lower < f1.lower * f2.lower - 1e-8 {
        return Err(Error::Numeric {
            what: "product seesaw fell below the product of factor lower bounds",
        });
    }
    let f12_upper = f1.upper * f2.upper;

    let tol = 5e-3;
    let lo_a = f1.lower * f2.lower - tol;
    let hi_a = f1.upper * f2.upper + tol;
    let consistent = lo_a.max(f12_lower) <= hi_a.min(f12_upper);
    Ok(Thm1Report { f1, f2, f12_lower, f12_upper, consistent })
}

/// The two-stage composite measurement: marginal POVM and resends on the
/// first factor, conditional POVMs and resends on the second, and their
/// tensor `M_{b,c} = E_b (x) F_{b,c}`.
#[derive(Clone, Debug)]
pub struct Thm2Composite {
    pub marginal_povm: Povm,
    pub phis: Vec<PureState>,
    /// Conditional distribution over second-factor states per outcome;
    /// `None` for outcomes carrying no mass.
    pub conditionals: Vec<Option<Vec<f64>>>,
    /// `N_b`, the mass of outcome b; sums to the marginal seesaw value.
    pub norms: Vec<f64>,
    /// `r_b = N_b / sum_a N_a`, zero for dropped outcomes.
    pub mixture: Vec<f64>,
    pub conditional_povms: Vec<Povm>,
    pub chis: Vec<Vec<PureState>>,
    pub composite: Povm,
    pub marginal_value: f64,
    pub conditional_values: Vec<f64>,
}

const OUTCOME_MASS_FLOOR: f64 = 1e-14;

fn common_dim(states: &[PureState], what: &'static str) -> Result<usize> {
    let first = states.first().ok_or(Error::Empty { what })?;
    let d = first.dim();
    for s in states {
        if s.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: s.dim() });
        }
    }
    Ok(d)
}

/// Build the composite measurement for a joint distribution: seesaw the
/// marginal ensemble, read off the per-outcome conditional distributions,
/// seesaw each conditional ensemble, and tensor the results.
pub fn theorem2_compose(
    p: &JointDistribution,
    states1: &[PureState],
    states2: &[PureState],
    config: &FidelityConfig,
) -> Result<Thm2Composite> {
    let d1 = common_dim(states1, "first-factor state set")?;
    let d2 = common_dim(states2, "second-factor state set")?;
    if p.rows() != states1.len() {
        return Err(Error::LengthMismatch { expected: p.rows(), found: states1.len() });
    }
    if p.cols() != states2.len() {
        return Err(Error::LengthMismatch { expected: p.cols(), found: states2.len() });
    }

    let marginal = Ensemble::new(p.marginal_rows(), states1.to_vec())?;
    let phi1 = phi_from_ensemble(&marginal);
    let outcomes1 = config.outcomes.unwrap_or(d1 * d1);
    let (marginal_value, strategy) = seesaw_with(
        &marginal,
        &phi1,
        outcomes1,
        config.restarts,
        config.max_outer,
        sample::derive_seed(config.seed, 31),
    )?;
    let marginal_povm = strategy.povm;
    let phis = strategy.resend_states;

    let outcome_count = marginal_povm.len();
    let mut conditionals: Vec<Option<Vec<f64>>> = Vec::with_capacity(outcome_count);
    let mut norms = Vec::with_capacity(outcome_count);
    let mut mixture = vec![0.0; outcome_count];
    let mut conditional_povms = Vec::with_capacity(outcome_count);
    let mut chis = Vec::with_capacity(outcome_count);
    let mut conditional_values = Vec::with_capacity(outcome_count);

    for (b, (eb, phi_b)) in marginal_povm.elements().iter().zip(&phis).enumerate() {
        // weight_i = p_i-independent part: <psi_i|E_b|psi_i> |<phi_b|psi_i>|^2.
        let weights_i: Vec<f64> = states1
            .iter()
            .map(|psi| {
                let detect = eb.expectation(psi).max(0.0);
                let overlap = psi.fidelity_with(phi_b);
                detect * overlap
            })
            .collect();
        let mut q_raw = vec![0.0f64; states2.len()];
        for (i, wi) in weights_i.iter().enumerate() {
            for (j, q) in q_raw.iter_mut().enumerate() {
                *q += p.prob(i, j) * wi;
            }
        }
        let n_b: f64 = q_raw.iter().sum();
        norms.push(n_b);
        if n_b <= OUTCOME_MASS_FLOOR {
            conditionals.push(None);
            conditional_povms.push(Povm::trivial(d2));
            chis.push(vec![PureState::basis(d2, 0)]);
            conditional_values.push(0.0);
            continue;
        }
        let mut q: Vec<f64> = q_raw.iter().map(|&v| v / n_b).collect();
        sample::normalize_weights(&mut q);
        let conditional = Ensemble::new(q.clone(), states2.to_vec())?;
        let phi2 = phi_from_ensemble(&conditional);
        let (val, strat) = seesaw_with(
            &conditional,
            &phi2,
            config.outcomes.unwrap_or(d2 * d2),
            config.restarts,
            config.max_outer,
            sample::derive_seed(config.seed, 200 + b as u64),
        )?;
        conditionals.push(Some(q));
        conditional_povms.push(strat.povm);
        chis.push(strat.resend_states);
        conditional_values.push(val);
    }

    let total: f64 = norms.iter().sum();
    for (b, n_b) in norms.iter().enumerate() {
        if *n_b > OUTCOME_MASS_FLOOR {
            mixture[b] = n_b / total;
        }
    }

    let mut elements = Vec::new();
    for (b, eb) in marginal_povm.elements().iter().enumerate() {
        for fc in conditional_povms[b].elements() {
            elements.push(povm::tensor(eb, fc));
        }
    }
    let composite = Povm::new(elements)?;

    Ok(Thm2Composite {
        marginal_povm,
        phis,
        conditionals,
        norms,
        mixture,
        conditional_povms,
        chis,
        composite,
        marginal_value,
        conditional_values,
    })
}

/// One ordering of the two-factor verification.
#[derive(Clone, Debug)]
pub struct Thm2Direction {
    pub composite: Thm2Composite,
    /// `sum_bc |Phi_12(M_bc)|` evaluated directly on the joint ensemble map.
    pub lhs: f64,
    /// Marginal value times the mixture of conditional values.
    pub rhs_weak: f64,
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct Thm2Report {
    pub forward: Thm2Direction,
    /// Same construction with the factors swapped (transposed joint
    /// distribution); the chain holds for either ordering.
    pub swapped: Thm2Direction,
    pub q1: QuantumnessReport,
    pub q2: QuantumnessReport,
    /// `lhs >= q1.lower * q2.lower - 5e-3` in both orderings.
    pub holds_quantumness: bool,
    pub holds: bool,
}

fn verify_direction(
    p: &JointDistribution,
    states1: &[PureState],
    states2: &[PureState],
    config: &FidelityConfig,
) -> Result<Thm2Direction> {
    let composite = theorem2_compose(p, states1, states2, config)?;
    let joint = joint_ensemble(p, states1, states2)?;
    let phi12 = phi_from_ensemble(&joint);
    let mut lhs = 0.0;
    for m in composite.composite.elements() {
        lhs += povm::operator_norm(&phi12.apply(m)?)?;
    }
    let mixed: f64 = composite
        .mixture
        .iter()
        .zip(&composite.conditional_values)
        .map(|(r, v)| r * v)
        .sum();
    let rhs_weak = composite.marginal_value * mixed;
    let holds = lhs >= rhs_weak - 1e-9;
    Ok(Thm2Direction { composite, lhs, rhs_weak, holds })
}

fn thin_quantumness_config(seed: u64) -> QuantumnessConfig {
    QuantumnessConfig {
        starts: 2,
        max_evals: 8,
        fidelity: FidelityConfig {
            restarts: 3,
            max_outer: 40,
            dual_rounds: 10,
            verify_probes: 4_000,
            verify_ascents: 8,
            seed,
            ..FidelityConfig::default()
        },
    }
}

/// Verify the inequality chain in both factor orderings and report the
/// quantumness-product comparison alongside.
pub fn verify_thm2(
    p: &JointDistribution,
    states1: &[PureState],
    states2: &[PureState],
    config: &FidelityConfig,
) -> Result<Thm2Report> {
    let forward = verify_direction(p, states1, states2, config)?;
    let transposed = p.transposed();
    let mut swapped_cfg = config.clone();
    swapped_cfg.seed = sample::derive_seed(config.seed, 51);
    let swapped = verify_direction(&transposed, states2, states1, &swapped_cfg)?;

    let q1 = quantumness(
        states1,
        &thin_quantumness_config(sample::derive_seed(config.seed, 61)),
        sample::derive_seed(config.seed, 61),
    )?;
    let q2 = quantumness(
        states2,
        &thin_quantumness_config(sample::derive_seed(config.seed, 62)),
        sample::derive_seed(config.seed, 62),
    )?;
    let product = q1.value_lower * q2.value_lower;
    let holds_quantumness =
        forward.lhs >= product - 5e-3 && swapped.lhs >= product - 5e-3;
    let holds = forward.holds && swapped.holds;
    Ok(Thm2Report { forward, swapped, q1, q2, holds_quantumness, holds })
}
