//! `qlab`: accessible fidelity, quantumness, and map-norm computations for
//! small pure-state ensembles, plus seeded verification suites for the
//! multiplicativity properties.

mod fixtures;
mod formats;
mod report;
mod runner;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use qlab_core::channel::nu_infinity;
use qlab_core::fidelity::{accessible_fidelity, FidelityConfig};
use qlab_core::quantumness::{quantumness, QuantumnessConfig};

use formats::{ChannelFile, EnsembleFile};
use report::{
    emit_json, FidelityOut, NuInfOut, QuantumnessOut, RunReport, TrialRow, VerifySummary,
    CSV_HEADER, LIBRARY_VERSION,
};
use verify::Suite;

#[derive(Debug)]
pub enum CliError {
    /// Unusable input: missing/malformed file, invalid flag combination.
    Input(String),
    /// The computation itself failed to produce a trustworthy result.
    Numeric(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Numeric(m) => m,
        }
    }
}

fn numeric_err(e: qlab_core::Error) -> CliError {
    CliError::Numeric(e.to_string())
}

/// Core errors raised while validating parsed input (rather than during
/// the computation itself) count as input errors.
fn precondition_err(e: qlab_core::Error) -> CliError {
    use qlab_core::Error as E;
    match e {
        E::NonSpanningStates { .. }
        | E::DimensionMismatch { .. }
        | E::LengthMismatch { .. }
        | E::InvalidDistribution { .. }
        | E::NotNormalized { .. }
        | E::Empty { .. } => CliError::Input(e.to_string()),
        other => CliError::Numeric(other.to_string()),
    }
}

#[derive(Parser)]
#[command(
    name = "qlab",
    version,
    about = "Accessible fidelity, quantumness, and maximal map norms for small ensembles"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Bracket the accessible fidelity of an ensemble file.
    Fidelity {
        /// Path to an ensemble JSON file.
        input: PathBuf,
        /// POVM outcome count for the search (default: dim^2).
        #[arg(long)]
        outcomes: Option<usize>,
        /// Random restarts for the primal search.
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        /// Root seed; all randomness derives from it.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Minimize the fidelity bracket over priors for a state-set file.
    Quantumness {
        input: PathBuf,
        /// Independent simplex-search starts.
        #[arg(long, default_value_t = 2)]
        starts: usize,
        /// Bracket evaluations allowed per start.
        #[arg(long, default_value_t = 12)]
        evals: usize,
        /// Random restarts inside each fidelity evaluation.
        #[arg(long, default_value_t = 6)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Maximal output operator norm of a channel file over pure inputs.
    NuInf {
        input: PathBuf,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run a seeded verification suite and emit per-trial CSV plus a JSON
    /// summary. Suites: thm1, thm2, lemma-eb, lemma-feas, appendix.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run trial 0 on this file instead of the built-in fixture:
        /// an ensemble file for thm1 (used as both factors), a joint
        /// distribution file for thm2.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Write the JSON summary here instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Write the per-trial CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let outcome = match cli.cmd {
        Cmd::Fidelity { input, outcomes, restarts, seed, json } => {
            cmd_fidelity(&input, outcomes, restarts, seed, json.as_deref())
        }
        Cmd::Quantumness { input, starts, evals, restarts, seed, json } => {
            cmd_quantumness(&input, starts, evals, restarts, seed, json.as_deref())
        }
        Cmd::NuInf { input, restarts, seed, json } => {
            cmd_nu_inf(&input, restarts, seed, json.as_deref())
        }
        Cmd::Verify { suite, trials, seed, input, json, csv } => {
            cmd_verify(&suite, trials, seed, input.as_deref(), json.as_deref(), csv.as_deref())
        }
    };
    eprintln!("wall time: {:.3?}", started.elapsed());
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn config_echo(pairs: &[(&str, String)]) -> Vec<(String, String)> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn cmd_fidelity(
    input: &std::path::Path,
    outcomes: Option<usize>,
    restarts: usize,
    seed: u64,
    json: Option<&std::path::Path>,
) -> Result<ExitCode, CliError> {
    let file: EnsembleFile = formats::read_json(input)?;
    let ensemble = file.into_ensemble()?;
    let mut cfg = FidelityConfig::default();
    cfg.outcomes = outcomes;
    cfg.restarts = restarts;
    cfg.seed = seed;
    let bracket = accessible_fidelity(&ensemble, &cfg).map_err(numeric_err)?;
    let out = FidelityOut::from_bracket(&bracket);
    let report = RunReport {
        command: "fidelity".to_string(),
        input: Some(input.display().to_string()),
        seed,
        config: config_echo(&[
            (
                "outcomes",
                outcomes.map_or("auto".to_string(), |b| b.to_string()),
            ),
            ("restarts", restarts.to_string()),
        ]),
        library_version: LIBRARY_VERSION,
        results: out,
    };
    if json.is_some() {
        println!(
            "fidelity bracket [{:.12}, {:.12}] width {:.3e} margin {:.3e}",
            report.results.lower,
            report.results.upper,
            report.results.width,
            report.results.certificate_margin
        );
    }
    emit_json(&report, json)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_quantumness(
    input: &std::path::Path,
    starts: usize,
    evals: usize,
    restarts: usize,
    seed: u64,
    json: Option<&std::path::Path>,
) -> Result<ExitCode, CliError> {
    let file: EnsembleFile = formats::read_json(input)?;
    let ensemble = file.into_ensemble()?;
    let states = ensemble.states().to_vec();
    let mut fidelity = FidelityConfig::light(seed);
    fidelity.restarts = restarts;
    let cfg = QuantumnessConfig { starts, max_evals: evals, fidelity };
    let rep = quantumness(&states, &cfg, seed).map_err(precondition_err)?;
    let report = RunReport {
        command: "quantumness".to_string(),
        input: Some(input.display().to_string()),
        seed,
        config: config_echo(&[
            ("starts", starts.to_string()),
            ("evals", evals.to_string()),
            ("restarts", restarts.to_string()),
        ]),
        library_version: LIBRARY_VERSION,
        results: QuantumnessOut::from_report(&rep),
    };
    if json.is_some() {
        println!(
            "quantumness [{:.12}, {:.12}] worst prior {:?}",
            report.results.value_lower, report.results.value_upper, report.results.worst_prior
        );
    }
    emit_json(&report, json)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_nu_inf(
    input: &std::path::Path,
    restarts: usize,
    seed: u64,
    json: Option<&std::path::Path>,
) -> Result<ExitCode, CliError> {
    let file: ChannelFile = formats::read_json(input)?;
    let map = file.into_map()?;
    let rep = nu_infinity(&map, restarts, seed).map_err(numeric_err)?;
    let report = RunReport {
        command: "nu-inf".to_string(),
        input: Some(input.display().to_string()),
        seed,
        config: config_echo(&[("restarts", restarts.to_string())]),
        library_version: LIBRARY_VERSION,
        results: NuInfOut::from_report(&rep),
    };
    if json.is_some() {
        println!("nu-inf {:.12}", report.results.value);
    }
    emit_json(&report, json)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(
    suite_name: &str,
    trials: usize,
    seed: u64,
    input: Option<&std::path::Path>,
    json: Option<&std::path::Path>,
    csv: Option<&std::path::Path>,
) -> Result<ExitCode, CliError> {
    let suite = Suite::parse(suite_name)?;
    let trial_zero = match (suite, input) {
        (_, None) => None,
        (Suite::Thm1, Some(p)) => {
            let file: EnsembleFile = formats::read_json(p)?;
            Some(verify::TrialZero::Ensemble(file.into_ensemble()?))
        }
        (Suite::Thm2, Some(p)) => {
            let file: formats::JointFile = formats::read_json(p)?;
            let (joint, s1, s2) = file.into_parts()?;
            Some(verify::TrialZero::Joint(joint, s1, s2))
        }
        (other, Some(_)) => {
            return Err(CliError::Input(format!(
                "suite {} does not take --input",
                other.name()
            )))
        }
    };
    let rows = verify::run_suite(suite, trials, seed, trial_zero)?;

    let mut csv_text = String::from(CSV_HEADER);
    csv_text.push('\n');
    for row in &rows {
        csv_text.push_str(&row.csv_line());
        csv_text.push('\n');
    }
    match csv {
        Some(p) => std::fs::write(p, &csv_text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {}", p.display(), e)))?,
        None => print!("{}", csv_text),
    }

    let summary = summarize(suite, &rows);
    let all_pass = summary.all_pass;
    let report = RunReport {
        command: format!("verify {}", suite.name()),
        input: None,
        seed,
        config: config_echo(&[("trials", trials.to_string())]),
        library_version: LIBRARY_VERSION,
        results: summary,
    };
    emit_json(&report, json)?;
    Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn summarize(suite: Suite, rows: &[TrialRow]) -> VerifySummary {
    let passed = rows.iter().filter(|r| r.pass).count();
    // "Worst" is the direction that would break the suite: smallest slack
    // for one-sided suites, largest magnitude for the two-sided one.
    let worst_gap = match suite {
        Suite::LemmaEb => rows
            .iter()
            .map(|r| r.gap)
            .fold(0.0f64, |acc, g| if g.abs() > acc.abs() { g } else { acc }),
        Suite::Appendix => rows.iter().map(|r| r.gap).fold(f64::NEG_INFINITY, f64::max),
        _ => rows.iter().map(|r| r.gap).fold(f64::INFINITY, f64::min),
    };
    VerifySummary {
        suite: suite.name().to_string(),
        trials: rows.len(),
        passed,
        failed: rows.len() - passed,
        worst_gap,
        tolerance: suite.tolerance(),
        failing_seeds: rows.iter().filter(|r| !r.pass).map(|r| r.seed).collect(),
        all_pass: passed == rows.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(suite: &'static str, trial: usize, gap: f64, pass: bool) -> TrialRow {
        TrialRow {
            suite,
            trial,
            seed: 100 + trial as u64,
            lhs: 1.0,
            rhs: 1.0 - gap,
            gap,
            tolerance: 1e-8,
            pass,
        }
    }

    // The process exit code for a verify run is 0 exactly when `all_pass`
    // holds; a single failing trial must flip it and be listed by seed.
    #[test]
    fn summary_flags_failures() {
        let ok = summarize(Suite::Thm1, &[row("thm1", 0, 0.1, true), row("thm1", 1, 0.2, true)]);
        assert!(ok.all_pass);
        assert_eq!(ok.failed, 0);
        assert!(ok.failing_seeds.is_empty());
        assert!((ok.worst_gap - 0.1).abs() < 1e-15);

        let bad = summarize(
            Suite::Thm1,
            &[row("thm1", 0, 0.1, true), row("thm1", 1, -0.3, false)],
        );
        assert!(!bad.all_pass);
        assert_eq!(bad.passed, 1);
        assert_eq!(bad.failed, 1);
        assert_eq!(bad.failing_seeds, vec![101]);
        assert!((bad.worst_gap + 0.3).abs() < 1e-15);
    }

    #[test]
    fn summary_worst_gap_direction_per_suite() {
        // Two-sided suite: largest magnitude, sign preserved.
        let eb = summarize(
            Suite::LemmaEb,
            &[row("lemma-eb", 0, -3e-6, true), row("lemma-eb", 1, 1e-6, true)],
        );
        assert!((eb.worst_gap + 3e-6).abs() < 1e-18);
        // Upper-bound suite: worst is the largest gap.
        let ap = summarize(
            Suite::Appendix,
            &[row("appendix", 0, -2e-12, true), row("appendix", 1, -8e-12, true)],
        );
        assert!((ap.worst_gap + 2e-12).abs() < 1e-20);
    }

    #[test]
    fn error_exit_codes_are_distinct() {
        assert_eq!(CliError::Input(String::new()).exit_code(), 2);
        assert_eq!(CliError::Numeric(String::new()).exit_code(), 3);
    }
}
