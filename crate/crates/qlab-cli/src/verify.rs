//! Seeded verification suites behind `qlab verify`. Every trial is a pure
//! function of its derived seed, so any failing row can be replayed from
//! the seed column alone.

use qlab_core::channel::{appendix_chain_check, check_eb_multiplicativity};
use qlab_core::ensemble::{Ensemble, JointDistribution};
use qlab_core::fidelity::{accessible_fidelity, FidelityConfig};
use qlab_core::products::{check_feasible_product, verify_thm1, verify_thm2};
use qlab_core::sample;
use qlab_core::state::PureState;

use crate::fixtures;
use crate::report::TrialRow;
use crate::runner;
use crate::CliError;

/// What trial 0 runs on: the built-in fixture by default, or the contents
/// of a user-supplied input file.
pub enum TrialZero {
    Ensemble(Ensemble),
    Joint(JointDistribution, Vec<PureState>, Vec<PureState>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Thm1,
    Thm2,
    LemmaEb,
    LemmaFeas,
    Appendix,
}

impl Suite {
    pub fn parse(name: &str) -> Result<Self, CliError> {
        match name {
            "thm1" => Ok(Suite::Thm1),
            "thm2" => Ok(Suite::Thm2),
            "lemma-eb" => Ok(Suite::LemmaEb),
            "lemma-feas" => Ok(Suite::LemmaFeas),
            "appendix" => Ok(Suite::Appendix),
            other => Err(CliError::Input(format!(
                "unknown suite '{}'; expected one of thm1, thm2, lemma-eb, lemma-feas, appendix",
                other
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Thm1 => "thm1",
            Suite::Thm2 => "thm2",
            Suite::LemmaEb => "lemma-eb",
            Suite::LemmaFeas => "lemma-feas",
            Suite::Appendix => "appendix",
        }
    }

    pub fn tolerance(self) -> f64 {
        match self {
            Suite::Thm1 => 1e-8,
            Suite::Thm2 => 1e-9,
            Suite::LemmaEb => 1e-5,
            Suite::LemmaFeas => 1e-7,
            Suite::Appendix => 1e-10,
        }
    }
}

fn random_qubit_pair(seed: u64) -> (Ensemble, Ensemble) {
    let mut rng = sample::rng_stream(seed, 0);
    let e1 = sample::random_ensemble_rng(2, 3, true, &mut rng).expect("random ensemble");
    let e2 = sample::random_ensemble_rng(2, 3, true, &mut rng).expect("random ensemble");
    (e1, e2)
}

fn spanning_qubit_states(rng: &mut impl rand::RngCore) -> Vec<PureState> {
    loop {
        let states = vec![
            sample::random_pure_state_rng(2, rng),
            sample::random_pure_state_rng(2, rng),
        ];
        if sample::states_span(2, &states) {
            return states;
        }
    }
}

fn thm2_config(seed: u64) -> FidelityConfig {
    FidelityConfig {
        restarts: 3,
        max_outer: 40,
        dual_rounds: 10,
        verify_probes: 4_000,
        verify_ascents: 8,
        seed,
        ..FidelityConfig::default()
    }
}

fn run_trial(
    suite: Suite,
    root_seed: u64,
    trial: usize,
    trial_zero: &Option<TrialZero>,
) -> Result<TrialRow, CliError> {
    let seed = sample::derive_seed(root_seed, trial as u64);
    let tol = suite.tolerance();
    let numeric = |e: qlab_core::Error| {
        CliError::Numeric(format!(
            "suite {} trial {} (seed {}): {}",
            suite.name(),
            trial,
            seed,
            e
        ))
    };
    match suite {
        Suite::Thm1 => {
            let (e1, e2) = if trial == 0 {
                match trial_zero {
                    Some(TrialZero::Ensemble(e)) => (e.clone(), e.clone()),
                    _ => (fixtures::basis_ensemble(2), fixtures::basis_ensemble(2)),
                }
            } else {
                random_qubit_pair(seed)
            };
            let r = verify_thm1(&e1, &e2, &FidelityConfig::light(seed)).map_err(numeric)?;
            let lhs = r.f12_lower;
            let rhs = r.f1.lower * r.f2.lower;
            let gap = lhs - rhs;
            let pass = r.consistent && gap >= -tol;
            Ok(TrialRow { suite: suite.name(), trial, seed, lhs, rhs, gap, tolerance: tol, pass })
        }
        Suite::Thm2 => {
            let (joint, s1, s2) = if trial == 0 {
                match trial_zero {
                    Some(TrialZero::Joint(p, s1, s2)) => (p.clone(), s1.clone(), s2.clone()),
                    _ => fixtures::correlated_joint(),
                }
            } else {
                let mut rng = sample::rng_stream(seed, 0);
                let joint = sample::random_joint_rng(2, 2, &mut rng);
                let s1 = spanning_qubit_states(&mut rng);
                let s2 = spanning_qubit_states(&mut rng);
                (joint, s1, s2)
            };
            let r = verify_thm2(&joint, &s1, &s2, &thm2_config(seed)).map_err(numeric)?;
            let lhs = r.forward.lhs;
            let rhs = r.forward.rhs_weak;
            let gap = lhs - rhs;
            let pass = r.holds;
            Ok(TrialRow { suite: suite.name(), trial, seed, lhs, rhs, gap, tolerance: tol, pass })
        }
        Suite::LemmaEb => {
            let mut rng = sample::rng_stream(seed, 0);
            let psi = sample::random_eb_map_rng(2, 2, &mut rng);
            let omega = sample::random_cp_map_rng(2, 2, &mut rng);
            let r = check_eb_multiplicativity(&psi, &omega, 32, seed).map_err(numeric)?;
            let lhs = r.nu12.value;
            let rhs = r.nu1.value * r.nu2.value;
            let gap = lhs - rhs;
            let pass = gap.abs() <= tol;
            Ok(TrialRow { suite: suite.name(), trial, seed, lhs, rhs, gap, tolerance: tol, pass })
        }
        Suite::LemmaFeas => {
            let (e1, e2) = random_qubit_pair(seed);
            let f1 = accessible_fidelity(&e1, &FidelityConfig::light(sample::derive_seed(seed, 1)))
                .map_err(numeric)?;
            let f2 = accessible_fidelity(&e2, &FidelityConfig::light(sample::derive_seed(seed, 2)))
                .map_err(numeric)?;
            let r = check_feasible_product(
                &e1,
                &e2,
                &f1.certificate,
                &f2.certificate,
                2_000,
                sample::derive_seed(seed, 3),
            )
            .map_err(numeric)?;
            // lhs is the worst probed margin; it must clear the -tol floor.
            let lhs = r.worst_margin;
            let rhs = -tol;
            let gap = lhs - rhs;
            let pass = r.holds;
            Ok(TrialRow { suite: suite.name(), trial, seed, lhs, rhs, gap, tolerance: tol, pass })
        }
        Suite::Appendix => {
            let mut rng = sample::rng_stream(seed, 0);
            let psi = sample::random_eb_map_rng(2, 2, &mut rng);
            let omega = sample::random_cp_map_rng(2, 2, &mut rng);
            let tau = sample::random_density_rng(2, 2, &mut rng);
            let r = appendix_chain_check(&psi, &omega, &tau, seed).map_err(numeric)?;
            let gap = r.lhs - r.rhs;
            let pass = r.holds;
            Ok(TrialRow {
                suite: suite.name(),
                trial,
                seed,
                lhs: r.lhs,
                rhs: r.rhs,
                gap,
                tolerance: tol,
                pass,
            })
        }
    }
}

pub fn run_suite(
    suite: Suite,
    trials: usize,
    root_seed: u64,
    trial_zero: Option<TrialZero>,
) -> Result<Vec<TrialRow>, CliError> {
    if trials == 0 {
        return Err(CliError::Input("--trials must be at least 1".into()));
    }
    let results = runner::map_ordered(trials, |t| run_trial(suite, root_seed, t, &trial_zero));
    results.into_iter().collect()
}
