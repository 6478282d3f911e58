//! Quantumness of a state set: the accessible fidelity minimized over
//! priors, explored by multistart simplex descent over the probability
//! simplex, plus the extreme-point maximum check.

use alloc::vec;
use alloc::vec::Vec;

use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::fidelity::{
    accessible_fidelity, accessible_fidelity_seesaw, ensure_spanning, FidelityBracket,
    FidelityConfig,
};
use crate::sample;
use crate::state::PureState;

/// One evaluated prior with its fidelity bracket endpoints.
#[derive(Clone, Debug)]
pub struct ProbeRecord {
    pub prior: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
}

/// Result of the prior minimization. `value_upper` is the smallest certified
/// upper bound found; `value_lower` subtracts the bracket slack at the
/// minimizing probe from the smallest lower bound seen, making the two-sided
/// error of the inner computation explicit.
#[derive(Clone, Debug)]
pub struct QuantumnessReport {
    pub value_lower: f64,
    pub value_upper: f64,
    pub worst_prior: Vec<f64>,
    pub trace: Vec<ProbeRecord>,
}

#[derive(Clone, Debug)]
pub struct QuantumnessConfig {
    /// Simplex-descent multistarts; start 0 is built around the uniform prior.
    pub starts: usize,
    /// Bracket evaluations allowed per start.
    pub max_evals: usize,
    /// Effort of each inner fidelity bracket.
    pub fidelity: FidelityConfig,
}

impl Default for QuantumnessConfig {
    fn default() -> Self {
        QuantumnessConfig { starts: 3, max_evals: 30, fidelity: FidelityConfig::light(0) }
    }
}

/// Fidelity bracket of the ensemble formed by `states` under `prior`.
/// Shared by the minimizer and by anyone re-checking a reported prior.
pub fn bracket_at_prior(
    states: &[PureState],
    prior: Vec<f64>,
    config: &FidelityConfig,
) -> Result<FidelityBracket> {
    let e = Ensemble::new(prior, states.to_vec())?;
    accessible_fidelity(&e, config)
}

fn validate_states(states: &[PureState]) -> Result<usize> {
    let first = states.first().ok_or(Error::Empty { what: "state set" })?;
    let d = first.dim();
    for s in states {
        if s.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: s.dim() });
        }
    }
    Ok(d)
}

fn project_prior(p: &mut Vec<f64>) {
    sample::normalize_weights(p);
}

/// Minimize `prior -> upper(accessible_fidelity)` over the simplex.
///
/// Deterministic given the seed: random simplex starts come from per-start
/// streams, and every inner bracket uses the configured fidelity seed, so a
/// reported prior reproduces its recorded bracket when re-evaluated.
pub fn quantumness(
    states: &[PureState],
    config: &QuantumnessConfig,
    seed: u64,
) -> Result<QuantumnessReport> {
    let d = validate_states(states)?;
    let n = states.len();
    {
        let uniform = Ensemble::uniform(states.to_vec())?;
        ensure_spanning(&uniform)?;
    }
    let _ = d;

    let mut trace: Vec<ProbeRecord> = Vec::new();
    let evaluate = |prior: Vec<f64>, trace: &mut Vec<ProbeRecord>| -> Result<f64> {
        let mut prior = prior;
        project_prior(&mut prior);
        // Reuse a bracket already computed for this exact prior.
        if let Some(hit) = trace.iter().find(|r| r.prior == prior) {
            return Ok(hit.upper);
        }
        let bracket = bracket_at_prior(states, prior.clone(), &config.fidelity)?;
        trace.push(ProbeRecord { prior, lower: bracket.lower, upper: bracket.upper });
        Ok(bracket.upper)
    };

    // The uniform prior is always probed: Q <= F(uniform) by definition.
    let uniform = vec![1.0 / n as f64; n];
    evaluate(uniform.clone(), &mut trace)?;

    for start in 0..config.starts.max(1) {
        let mut evals_left = config.max_evals;
        let mut budget = |trace: &mut Vec<ProbeRecord>, p: Vec<f64>| -> Result<Option<f64>> {
            if evals_left == 0 {
                return Ok(None);
            }
            evals_left -= 1;
            evaluate(p, trace).map(Some)
        };

        // Vertex set of size n (the simplex is (n-1)-dimensional).
        let mut vertices: Vec<Vec<f64>> = if start == 0 {
            let mut vs = vec![uniform.clone()];
            for k in 1..n {
                let mut p = uniform.clone();
                p[k] += 0.35;
                project_prior(&mut p);
                vs.push(p);
            }
            vs
        } else {
            let mut rng = sample::rng_stream(sample::derive_seed(seed, 40 + start as u64), 0);
            (0..n).map(|_| sample::random_weights_rng(n, &mut rng)).collect()
        };
        let mut values: Vec<f64> = Vec::with_capacity(n);
        let mut exhausted = false;
        for v in &vertices {
            match budget(&mut trace, v.clone())? {
                Some(val) => values.push(val),
                None => {
                    exhausted = true;
                    break;
                }
            }
        }
        if exhausted || n == 1 {
            continue;
        }

        // Simplex descent: reflect, contract, shrink; projection keeps every
        // iterate on the probability simplex.
        loop {
            let mut order: Vec<usize> = (0..vertices.len()).collect();
            order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
            let best = order[0];
            let worst = *order.last().unwrap();
            let second_worst = order[order.len() - 2];

            let spread: f64 = (0..n)
                .map(|k| {
                    let lo = vertices.iter().map(|v| v[k]).fold(f64::INFINITY, f64::min);
                    let hi = vertices.iter().map(|v| v[k]).fold(f64::NEG_INFINITY, f64::max);
                    hi - lo
                })
                .fold(0.0, f64::max);
            if spread < 1e-4 {
                break;
            }

            let mut centroid = vec![0.0; n];
            for (i, v) in vertices.iter().enumerate() {
                if i == worst {
                    continue;
                }
                for k in 0..n {
                    centroid[k] += v[k] / (vertices.len() - 1) as f64;
                }
            }

            let reflected: Vec<f64> = (0..n)
                .map(|k| centroid[k] + (centroid[k] - vertices[worst][k]))
                .collect();
            let fr = match budget(&mut trace, reflected.clone())? {
                Some(v) => v,
                None => break,
            };
            if fr < values[second_worst] {
                let mut p = reflected;
                project_prior(&mut p);
                vertices[worst] = p;
                values[worst] = fr;
                continue;
            }

            let contracted: Vec<f64> = (0..n)
                .map(|k| centroid[k] + 0.5 * (vertices[worst][k] - centroid[k]))
                .collect();
            let fc = match budget(&mut trace, contracted.clone())? {
                Some(v) => v,
                None => break,
            };
            if fc < values[worst] {
                let mut p = contracted;
                project_prior(&mut p);
                vertices[worst] = p;
                values[worst] = fc;
                continue;
            }

            // Shrink toward the best vertex.
            let best_vertex = vertices[best].clone();
            let mut shrink_exhausted = false;
            for i in 0..vertices.len() {
                if i == best {
                    continue;
                }
                let mut p: Vec<f64> = (0..n)
                    .map(|k| best_vertex[k] + 0.5 * (vertices[i][k] - best_vertex[k]))
                    .collect();
                project_prior(&mut p);
                match budget(&mut trace, p.clone())? {
                    Some(v) => {
                        vertices[i] = p;
                        values[i] = v;
                    }
                    None => {
                        shrink_exhausted = true;
                        break;
                    }
                }
            }
            if shrink_exhausted {
                break;
            }
        }
    }

    let argmin = trace
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.upper.partial_cmp(&b.1.upper).unwrap())
        .map(|(i, _)| i)
        .expect("trace holds at least the uniform prior");
    let value_upper = trace[argmin].upper;
    let slack = trace[argmin].upper - trace[argmin].lower;
    let min_lower = trace.iter().map(|r| r.lower).fold(f64::INFINITY, f64::min);
    Ok(QuantumnessReport {
        value_lower: (min_lower - slack).max(0.0),
        value_upper,
        worst_prior: trace[argmin].prior.clone(),
        trace,
    })
}

/// Executable form of the extreme-point argument: the maximum of the
/// accessible fidelity over priors is 1, attained at any point mass.
/// The seesaw at the point-mass prior must confirm the value within 1e-9.
pub fn max_fidelity_over_priors(states: &[PureState]) -> Result<(f64, Vec<f64>)> {
    let d = validate_states(states)?;
    let n = states.len();
    {
        let uniform = Ensemble::uniform(states.to_vec())?;
        ensure_spanning(&uniform)?;
    }
    let mut prior = vec![0.0; n];
    prior[0] = 1.0;
    let e = Ensemble::new(prior.clone(), states.to_vec())?;
    let (value, _) = accessible_fidelity_seesaw(&e, d * d, 2, 0)?;
    if (value - 1.0).abs() > 1e-9 {
        return Err(Error::Numeric { what: "point-mass prior failed to reach fidelity one" });
    }
    Ok((value, prior))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fmath::LibmExt;
    use num_complex::Complex64 as C64;

    fn trine() -> Vec<PureState> {
        // Three real qubit states at pairwise 120 degrees on the Bloch circle.
        let mk = |angle: f64| {
            PureState::new(vec![
                C64::new((angle / 2.0).lm_cos(), 0.0),
                C64::new((angle / 2.0).lm_sin(), 0.0),
            ])
            .unwrap()
        };
        let third = 2.0 * core::f64::consts::PI / 3.0;
        vec![mk(0.0), mk(third), mk(2.0 * third)]
    }

    fn tiny_config(seed: u64) -> QuantumnessConfig {
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

    #[test]
    fn orthonormal_basis_value_is_one() {
        let states = vec![PureState::basis(2, 0), PureState::basis(2, 1)];
        let report = quantumness(&states, &tiny_config(1), 1).unwrap();
        assert!((report.value_upper - 1.0).abs() < 5e-3, "upper {}", report.value_upper);
        assert!((report.value_lower - 1.0).abs() < 5e-3, "lower {}", report.value_lower);
        assert!(report.value_lower <= report.value_upper + 1e-8);
    }

    #[test]
    fn single_state_dimension_one() {
        let states = vec![PureState::basis(1, 0)];
        let report = quantumness(&states, &tiny_config(2), 2).unwrap();
        assert!((report.value_upper - 1.0).abs() < 1e-6);
        assert!(report.worst_prior == vec![1.0]);
    }

    #[test]
    fn non_spanning_rejected() {
        let states = vec![PureState::basis(2, 0)];
        assert!(matches!(
            quantumness(&states, &tiny_config(0), 0),
            Err(Error::NonSpanningStates { rank: 1, dim: 2 })
        ));
    }

    #[test]
    fn worst_prior_on_simplex_and_below_uniform() {
        let states = trine();
        let report = quantumness(&states, &tiny_config(3), 3).unwrap();
        let sum: f64 = report.worst_prior.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert!(report.worst_prior.iter().all(|&p| p >= 0.0));
        // Q is an inf over a set containing the uniform prior.
        let uniform = report
            .trace
            .iter()
            .find(|r| r.prior.iter().all(|&p| (p - 1.0 / 3.0).abs() < 1e-12))
            .expect("uniform prior probed");
        assert!(report.value_upper <= uniform.upper + 1e-8);
    }

    #[test]
    fn deterministic_given_seed() {
        let states = trine();
        let a = quantumness(&states, &tiny_config(5), 5).unwrap();
        let b = quantumness(&states, &tiny_config(5), 5).unwrap();
        assert_eq!(a.value_upper.to_bits(), b.value_upper.to_bits());
        assert_eq!(a.value_lower.to_bits(), b.value_lower.to_bits());
        assert_eq!(a.worst_prior, b.worst_prior);
        assert_eq!(a.trace.len(), b.trace.len());
    }

    #[test]
    fn worst_prior_reproduces_bracket() {
        let states = trine();
        let cfg = tiny_config(7);
        let report = quantumness(&states, &cfg, 7).unwrap();
        let again = bracket_at_prior(&states, report.worst_prior.clone(), &cfg.fidelity).unwrap();
        let recorded = report
            .trace
            .iter()
            .find(|r| r.prior == report.worst_prior)
            .expect("worst prior is in the trace");
        assert_eq!(again.upper.to_bits(), recorded.upper.to_bits());
        assert_eq!(again.lower.to_bits(), recorded.lower.to_bits());
    }

    #[test]
    fn extreme_point_maximum() {
        let states = trine();
        let (value, prior) = max_fidelity_over_priors(&states).unwrap();
        assert!((value - 1.0).abs() <= 1e-9);
        assert_eq!(prior, vec![1.0, 0.0, 0.0]);

        let pair = vec![
            PureState::basis(2, 0),
            PureState::new(vec![
                C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0),
                C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0),
            ])
            .unwrap(),
        ];
        let (value, prior) = max_fidelity_over_priors(&pair).unwrap();
        assert!((value - 1.0).abs() <= 1e-9);
        assert_eq!(prior, vec![1.0, 0.0]);
    }
}
