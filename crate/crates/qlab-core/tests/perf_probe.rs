//! Ignored-by-default wall-clock probes used to size the verification
//! configs against the runtime budgets. Run explicitly:
//! `cargo test -p qlab-core --test perf_probe -- --ignored --nocapture`

use std::time::Instant;

use qlab_core::channel::{appendix_chain_check, check_eb_multiplicativity};
use qlab_core::ensemble::JointDistribution;
use qlab_core::fidelity::{
    accessible_fidelity, pair_resend_grid_oracle, FidelityConfig,
};
use qlab_core::products::{verify_thm1, verify_thm2};
use qlab_core::quantumness::{quantumness, QuantumnessConfig};
use qlab_core::sample;
use qlab_core::state::PureState;
use num_complex::Complex64 as C64;

fn trine() -> Vec<PureState> {
    let mk = |angle: f64| {
        PureState::new(vec![
            C64::new((angle / 2.0).cos(), 0.0),
            C64::new((angle / 2.0).sin(), 0.0),
        ])
        .unwrap()
    };
    let third = 2.0 * core::f64::consts::PI / 3.0;
    vec![mk(0.0), mk(third), mk(2.0 * third)]
}

#[test]
#[ignore]
fn probe_fidelity_light() {
    let mut rng = sample::rng_from_seed(7);
    let t = Instant::now();
    for k in 0..5 {
        let e = sample::random_ensemble_rng(2, 3, true, &mut rng).unwrap();
        let f = accessible_fidelity(&e, &FidelityConfig::light(k)).unwrap();
        println!("fidelity light: [{:.6}, {:.6}] width {:.2e}", f.lower, f.upper, f.width());
    }
    println!("5x accessible_fidelity light: {:?}", t.elapsed());
}

#[test]
#[ignore]
fn probe_thm1() {
    let mut rng = sample::rng_from_seed(8);
    let e1 = sample::random_ensemble_rng(2, 3, true, &mut rng).unwrap();
    let e2 = sample::random_ensemble_rng(2, 2, true, &mut rng).unwrap();
    let t = Instant::now();
    let r = verify_thm1(&e1, &e2, &FidelityConfig::light(3)).unwrap();
    println!(
        "thm1: f1 [{:.5},{:.5}] f2 [{:.5},{:.5}] f12 [{:.5},{:.5}] consistent {} in {:?}",
        r.f1.lower, r.f1.upper, r.f2.lower, r.f2.upper, r.f12_lower, r.f12_upper, r.consistent,
        t.elapsed()
    );
}

#[test]
#[ignore]
fn probe_eb() {
    let mut rng = sample::rng_from_seed(9);
    let t = Instant::now();
    for k in 0..5 {
        let psi = sample::random_eb_map_rng(2, 2, &mut rng);
        let omega = sample::random_cp_map_rng(2, 2, &mut rng);
        let r = check_eb_multiplicativity(&psi, &omega, 32, k).unwrap();
        println!("eb gap {:.2e}", r.gap);
    }
    println!("5x eb multiplicativity: {:?}", t.elapsed());
}

#[test]
#[ignore]
fn probe_appendix() {
    let mut rng = sample::rng_from_seed(10);
    let t = Instant::now();
    for k in 0..20 {
        let psi = sample::random_eb_map_rng(2, 2, &mut rng);
        let omega = sample::random_cp_map_rng(2, 2, &mut rng);
        let tau = sample::random_density_rng(2, 2, &mut rng);
        let r = appendix_chain_check(&psi, &omega, &tau, k).unwrap();
        assert!(r.holds);
    }
    println!("20x appendix chain: {:?}", t.elapsed());
}

#[test]
#[ignore]
fn probe_thm2() {
    let mut rng = sample::rng_from_seed(11);
    let joint = sample::random_joint_rng(2, 2, &mut rng);
    let s1 = vec![
        sample::random_pure_state_rng(2, &mut rng),
        sample::random_pure_state_rng(2, &mut rng),
    ];
    let s2 = vec![
        sample::random_pure_state_rng(2, &mut rng),
        sample::random_pure_state_rng(2, &mut rng),
    ];
    let cfg = FidelityConfig {
        restarts: 3,
        max_outer: 40,
        dual_rounds: 10,
        verify_probes: 4_000,
        verify_ascents: 8,
        seed: 0,
        ..FidelityConfig::default()
    };
    let t = Instant::now();
    let r = verify_thm2(&joint, &s1, &s2, &cfg).unwrap();
    println!(
        "thm2: lhs {:.6} rhs {:.6} holds {} holds_q {} in {:?}",
        r.forward.lhs, r.forward.rhs_weak, r.holds, r.holds_quantumness, t.elapsed()
    );
}

#[test]
#[ignore]
fn probe_quantumness() {
    let t = Instant::now();
    let cfg = QuantumnessConfig::default();
    let r = quantumness(&trine(), &cfg, 0).unwrap();
    println!(
        "trine quantumness default: [{:.6},{:.6}] prior {:?} probes {} in {:?}",
        r.value_lower, r.value_upper, r.worst_prior, r.trace.len(), t.elapsed()
    );
}

#[test]
#[ignore]
fn probe_grid_oracle() {
    let pair = qlab_core::ensemble::Ensemble::uniform(vec![
        PureState::basis(2, 0),
        PureState::new(vec![
            C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0),
            C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0),
        ])
        .unwrap(),
    ])
    .unwrap();
    let t = Instant::now();
    let v = pair_resend_grid_oracle(&pair).unwrap();
    println!("grid oracle {:.9} in {:?}", v, t.elapsed());
}

#[test]
#[ignore]
fn probe_thm2_regression_values() {
    // Source of frozen numbers for the diag(1/2, 1/2) regression test.
    let joint = JointDistribution::new(2, 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
    let pair = vec![
        PureState::basis(2, 0),
        PureState::new(vec![
            C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0),
            C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0),
        ])
        .unwrap(),
    ];
    let cfg = FidelityConfig {
        restarts: 3,
        max_outer: 40,
        dual_rounds: 10,
        verify_probes: 4_000,
        verify_ascents: 8,
        seed: 0,
        ..FidelityConfig::default()
    };
    let r = verify_thm2(&joint, &pair, &pair, &cfg).unwrap();
    println!("frozen thm2: lhs {:.15} rhs {:.15}", r.forward.lhs, r.forward.rhs_weak);
    println!("marginal {:.15}", r.forward.composite.marginal_value);
    println!("norms {:?}", r.forward.composite.norms);
    println!("mixture {:?}", r.forward.composite.mixture);
    println!("q1 [{:.15},{:.15}]", r.q1.value_lower, r.q1.value_upper);
}
