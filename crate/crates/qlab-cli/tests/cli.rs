//! End-to-end tests of the `qlab` binary: exit codes, frozen outputs for
//! fixed seeds, byte-level determinism, and agreement between the bundled
//! fixture files and their in-code counterparts.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qlab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qlab"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    let mut cmd = qlab();
    cmd.args(args);
    cmd.output().expect("binary launches")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn results(out: &Output) -> serde_json::Value {
    stdout_json(out)["results"].clone()
}

#[test]
fn fidelity_trine_frozen_bracket() {
    let out = run(&[
        "fidelity",
        fixture("trine.json").to_str().unwrap(),
        "--seed",
        "7",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["command"], "fidelity");
    assert_eq!(v["seed"], 7);
    assert_eq!(v["library_version"], "0.1.0");
    let r = &v["results"];
    assert_eq!(r["lower"].as_f64().unwrap(), 0.7499999999997188);
    assert_eq!(r["upper"].as_f64().unwrap(), 0.7500000119701131);
    assert!(r["certificate_trace"].as_f64().unwrap() > 0.0);
    assert!(r["certificate_margin"].as_f64().unwrap() >= -1e-9);
    assert_eq!(r["outcomes"], 4);
    assert_eq!(r["resend_states"].as_array().unwrap().len(), 4);
}

#[test]
fn quantumness_pair_frozen_bracket() {
    let out = run(&["quantumness", fixture("pair_cos45.json").to_str().unwrap()]);
    let r = results(&out);
    assert_eq!(r["value_lower"].as_f64().unwrap(), 0.9330125614096895);
    assert_eq!(r["value_upper"].as_f64().unwrap(), 0.9330128230070683);
    assert_eq!(r["worst_prior"][0].as_f64().unwrap(), 0.5);
    assert_eq!(r["worst_prior"][1].as_f64().unwrap(), 0.5);
    assert_eq!(r["priors_probed"], 23);
}

#[test]
fn quantumness_single_state_is_unity() {
    let out = run(&["quantumness", fixture("single.json").to_str().unwrap()]);
    let r = results(&out);
    assert!((r["value_lower"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((r["value_upper"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn nu_inf_known_channels() {
    let id = results(&run(&["nu-inf", fixture("channel_identity.json").to_str().unwrap()]));
    assert!((id["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let rep = results(&run(&["nu-inf", fixture("channel_replace_half.json").to_str().unwrap()]));
    assert!((rep["value"].as_f64().unwrap() - 0.5).abs() < 1e-12);

    let eb = results(&run(&["nu-inf", fixture("channel_eb.json").to_str().unwrap()]));
    assert_eq!(eb["value"].as_f64().unwrap(), 0.5462370725029577);
    assert_eq!(eb["restarts_used"], 32);
}

#[test]
fn verify_trial_zero_rows_are_frozen() {
    let out = run(&["verify", "thm1", "--trials", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("suite,trial,seed,lhs,rhs,gap,tolerance,pass\n"));
    assert!(
        text.contains("\nthm1,0,0,1,1,0,0.00000001,true\n"),
        "thm1 row missing in:\n{}",
        text
    );

    let out2 = run(&["verify", "thm2", "--trials", "1"]);
    assert!(out2.status.success());
    let text2 = String::from_utf8(out2.stdout).unwrap();
    assert!(
        text2.contains(
            "\nthm2,0,0,0.9499864003537181,0.9131521591299685,0.036834241223749564,0.000000001,true\n"
        ),
        "thm2 row missing in:\n{}",
        text2
    );
}

#[test]
fn verify_each_remaining_suite_passes() {
    for (suite, trials) in [("lemma-eb", "2"), ("lemma-feas", "1"), ("appendix", "3")] {
        let out = run(&["verify", suite, "--trials", trials]);
        assert!(
            out.status.success(),
            "{} failed: {}",
            suite,
            String::from_utf8_lossy(&out.stderr)
        );
        let text = String::from_utf8(out.stdout).unwrap();
        for line in text.lines().skip(1).take_while(|l| l.starts_with(suite)) {
            assert!(line.ends_with(",true"), "failing row: {}", line);
        }
        assert!(text.contains("\"all_pass\": true"));
    }
}

#[test]
fn verify_input_override_reproduces_default_trial_zero() {
    // thm1 with an explicit ensemble file: trial 0 becomes that ensemble on
    // both factors; the bundled basis file reproduces the built-in default.
    let with_input = run(&[
        "verify",
        "thm1",
        "--trials",
        "1",
        "--input",
        fixture("basis2.json").to_str().unwrap(),
    ]);
    assert!(with_input.status.success());
    let text = String::from_utf8(with_input.stdout).unwrap();
    assert!(text.contains("\nthm1,0,0,1,1,0,0.00000001,true\n"));

    // thm2 with the bundled joint file matches the built-in default joint.
    let with_joint = run(&[
        "verify",
        "thm2",
        "--trials",
        "1",
        "--input",
        fixture("joint_correlated.json").to_str().unwrap(),
    ]);
    assert!(with_joint.status.success());
    let jt = String::from_utf8(with_joint.stdout).unwrap();
    assert!(jt.contains(
        "\nthm2,0,0,0.9499864003537181,0.9131521591299685,0.036834241223749564,0.000000001,true\n"
    ));
}

#[test]
fn identical_invocations_are_byte_identical() {
    let a = run(&["fidelity", fixture("trine.json").to_str().unwrap(), "--seed", "7"]);
    let b = run(&["fidelity", fixture("trine.json").to_str().unwrap(), "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "fidelity stdout differs between runs");

    let c = run(&["nu-inf", fixture("channel_eb.json").to_str().unwrap(), "--seed", "3"]);
    let d = run(&["nu-inf", fixture("channel_eb.json").to_str().unwrap(), "--seed", "3"]);
    assert_eq!(c.stdout, d.stdout, "nu-inf stdout differs between runs");
}

#[test]
fn verify_file_outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<(PathBuf, PathBuf)> = (0..2)
        .map(|k| {
            (
                dir.path().join(format!("report{}.json", k)),
                dir.path().join(format!("rows{}.csv", k)),
            )
        })
        .collect();
    for (json, csv) in &paths {
        let out = run(&[
            "verify",
            "thm2",
            "--trials",
            "1",
            "--json",
            json.to_str().unwrap(),
            "--csv",
            csv.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let j0 = std::fs::read(&paths[0].0).unwrap();
    let j1 = std::fs::read(&paths[1].0).unwrap();
    assert_eq!(j0, j1, "JSON report differs between runs");
    let c0 = std::fs::read(&paths[0].1).unwrap();
    let c1 = std::fs::read(&paths[1].1).unwrap();
    assert_eq!(c0, c1, "CSV rows differ between runs");
    assert!(!j0.is_empty() && !c0.is_empty());
}

#[test]
fn worker_count_does_not_change_output() {
    let run_with = |threads: &str| {
        let mut cmd = qlab();
        cmd.args(["verify", "appendix", "--trials", "3"]);
        cmd.env("QLAB_THREADS", threads);
        let out = cmd.output().unwrap();
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run_with("1"), run_with("2"));
}

#[test]
fn malformed_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    };
    let truncated = write("truncated.json", "{\"dim\": 2, \"states\":");
    let badnorm = write(
        "badnorm.json",
        r#"{"dim": 2, "states": [[[0.9,0],[0,0]],[[0,0],[0.9,0]]]}"#,
    );
    let badweights = write(
        "badweights.json",
        r#"{"dim": 2, "states": [[[1,0],[0,0]],[[0,0],[1,0]]], "weights": [0.9, 0.2]}"#,
    );
    let nonspan = write(
        "nonspan.json",
        r#"{"dim": 2, "states": [[[1,0],[0,0]],[[1,0],[0,0]]]}"#,
    );
    let unknown_field = write(
        "unknown.json",
        r#"{"dim": 2, "states": [[[1,0],[0,0]],[[0,0],[1,0]]], "extra": 1}"#,
    );
    let missing = dir.path().join("does_not_exist.json");

    let cases: Vec<(Vec<&str>, &str)> = vec![
        (vec!["fidelity", truncated.to_str().unwrap()], "parse error"),
        (vec!["fidelity", missing.to_str().unwrap()], "missing file"),
        (vec!["fidelity", badnorm.to_str().unwrap()], "denormalized state"),
        (vec!["fidelity", badweights.to_str().unwrap()], "bad weights"),
        (vec!["fidelity", unknown_field.to_str().unwrap()], "unknown field"),
        (vec!["quantumness", nonspan.to_str().unwrap()], "non-spanning states"),
        (vec!["verify", "thm9", "--trials", "2"], "unknown suite"),
        (vec!["verify", "thm1", "--trials", "0"], "zero trials"),
        (
            vec![
                "verify",
                "lemma-eb",
                "--trials",
                "1",
                "--input",
                "ignored.json",
            ],
            "input on suite without one",
        ),
    ];
    for (args, label) in cases {
        let out = run(&args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{} should exit 2, got {:?}; stderr: {}",
            label,
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(
            String::from_utf8_lossy(&out.stderr).contains("error:"),
            "{}: stderr lacks error line",
            label
        );
    }
}

#[test]
fn usage_errors_exit_two() {
    let out = run(&["fidelity"]);
    assert_eq!(out.status.code(), Some(2), "missing argument should exit 2");
    let out = run(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2), "unknown subcommand should exit 2");
}

#[test]
fn numeric_overflow_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("huge.json");
    std::fs::write(
        &p,
        r#"{
  "representation": "kraus",
  "in_dim": 2,
  "out_dim": 2,
  "operators": [
    [[[1e160, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1e160, 0.0]]]
  ]
}"#,
    )
    .unwrap();
    let out = run(&["nu-inf", p.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("non-finite"));
}

#[test]
fn fixtures_match_their_in_code_counterparts() {
    use num_complex::Complex64 as C64;
    use qlab_core::state::PureState;

    let parse_states = |name: &str| -> (usize, Vec<Vec<[f64; 2]>>) {
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap();
        let dim = v["dim"].as_u64().unwrap() as usize;
        let states = v["states"]
            .as_array()
            .unwrap()
            .iter()
            .map(|s| {
                s.as_array()
                    .unwrap()
                    .iter()
                    .map(|a| {
                        let p = a.as_array().unwrap();
                        [p[0].as_f64().unwrap(), p[1].as_f64().unwrap()]
                    })
                    .collect()
            })
            .collect();
        (dim, states)
    };

    // The two-state fixture holds |0> and the overlap-cos(pi/4) partner.
    let (dim, states) = parse_states("pair_cos45.json");
    assert_eq!(dim, 2);
    let expect = [
        PureState::basis(2, 0),
        PureState::new(vec![
            C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0),
            C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0),
        ])
        .unwrap(),
    ];
    for (raw, want) in states.iter().zip(&expect) {
        for (a, w) in raw.iter().zip(want.amplitudes()) {
            assert!((a[0] - w.re).abs() < 1e-15 && (a[1] - w.im).abs() < 1e-15);
        }
    }

    // The three-state fixture holds the symmetric qubit triple.
    let (_, trine) = parse_states("trine.json");
    let third = 2.0 * core::f64::consts::PI / 3.0;
    for (k, raw) in trine.iter().enumerate() {
        let a = k as f64 * third / 2.0;
        assert!((raw[0][0] - a.cos()).abs() < 1e-15);
        assert!((raw[1][0] - a.sin()).abs() < 1e-15);
    }

    // The joint fixture is the perfectly correlated distribution over two
    // copies of the pair states.
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("joint_correlated.json")).unwrap())
            .unwrap();
    assert_eq!(v["dim1"], 2);
    assert_eq!(v["dim2"], 2);
    let probs = v["probs"].as_array().unwrap();
    assert_eq!(probs[0][0].as_f64().unwrap(), 0.5);
    assert_eq!(probs[0][1].as_f64().unwrap(), 0.0);
    assert_eq!(probs[1][0].as_f64().unwrap(), 0.0);
    assert_eq!(probs[1][1].as_f64().unwrap(), 0.5);
    assert_eq!(v["states1"], v["states2"]);
}
