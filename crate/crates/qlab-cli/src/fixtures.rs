//! In-code copies of the bundled JSON fixtures. Trial 0 of the thm1/thm2
//! verification suites runs on these, so the bundled anchors are exercised
//! even without a file argument; a test pins the JSON files to this module.

use num_complex::Complex64 as C64;

use qlab_core::ensemble::{Ensemble, JointDistribution};
use qlab_core::state::PureState;

pub fn basis_states(dim: usize) -> Vec<PureState> {
    (0..dim).map(|k| PureState::basis(dim, k)).collect()
}

pub fn basis_ensemble(dim: usize) -> Ensemble {
    Ensemble::uniform(basis_states(dim)).expect("basis ensemble")
}

/// Qubit pair with overlap cos(pi/4).
pub fn pair_states() -> Vec<PureState> {
    let c = core::f64::consts::FRAC_1_SQRT_2;
    vec![
        PureState::basis(2, 0),
        PureState::new(vec![C64::new(c, 0.0), C64::new(c, 0.0)]).expect("pair state"),
    ]
}

/// Perfectly correlated diag(1/2, 1/2) joint distribution over two copies
/// of the cos(pi/4) pair.
pub fn correlated_joint() -> (JointDistribution, Vec<PureState>, Vec<PureState>) {
    let joint = JointDistribution::new(2, 2, vec![0.5, 0.0, 0.0, 0.5]).expect("joint");
    (joint, pair_states(), pair_states())
}
