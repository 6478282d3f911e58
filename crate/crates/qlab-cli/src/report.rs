//! Machine-readable run reports. Everything serialized here is a pure
//! function of (input, flags, seed), so identical invocations produce
//! byte-identical JSON; wall time goes to the error stream only.

use std::fs;
use std::path::Path;

use serde::Serialize;

use qlab_core::channel::NuInfReport;
use qlab_core::fidelity::FidelityBracket;
use qlab_core::quantumness::QuantumnessReport;
use qlab_core::state::PureState;

use crate::CliError;

pub const LIBRARY_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
pub struct RunReport<T: Serialize> {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    pub seed: u64,
    pub config: Vec<(String, String)>,
    pub library_version: &'static str,
    pub results: T,
}

pub fn state_to_pairs(s: &PureState) -> Vec<[f64; 2]> {
    s.amplitudes().iter().map(|z| [z.re, z.im]).collect()
}

#[derive(Debug, Serialize)]
pub struct FidelityOut {
    pub lower: f64,
    pub upper: f64,
    pub width: f64,
    pub certificate_trace: f64,
    pub certificate_margin: f64,
    pub certificate_probes: usize,
    pub outcomes: usize,
    pub resend_states: Vec<Vec<[f64; 2]>>,
}

impl FidelityOut {
    pub fn from_bracket(b: &FidelityBracket) -> Self {
        FidelityOut {
            lower: b.lower,
            upper: b.upper,
            width: b.width(),
            certificate_trace: b.certificate.x.trace(),
            certificate_margin: b.certificate.margin,
            certificate_probes: b.certificate.probe_count,
            outcomes: b.strategy.povm.len(),
            resend_states: b.strategy.resend_states.iter().map(state_to_pairs).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct QuantumnessOut {
    pub value_lower: f64,
    pub value_upper: f64,
    pub worst_prior: Vec<f64>,
    pub priors_probed: usize,
}

impl QuantumnessOut {
    pub fn from_report(r: &QuantumnessReport) -> Self {
        QuantumnessOut {
            value_lower: r.value_lower,
            value_upper: r.value_upper,
            worst_prior: r.worst_prior.clone(),
            priors_probed: r.trace.len(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct NuInfOut {
    pub value: f64,
    pub restarts_used: usize,
    pub argmax_state: Vec<[f64; 2]>,
    pub best_per_restart: Vec<f64>,
}

impl NuInfOut {
    pub fn from_report(r: &NuInfReport) -> Self {
        NuInfOut {
            value: r.value,
            restarts_used: r.restarts_used,
            argmax_state: state_to_pairs(&r.argmax_state),
            best_per_restart: r.best_per_restart.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct VerifySummary {
    pub suite: String,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    pub worst_gap: f64,
    pub tolerance: f64,
    pub failing_seeds: Vec<u64>,
    pub all_pass: bool,
}

/// One verification trial in the stable CSV schema
/// `suite,trial,seed,lhs,rhs,gap,tolerance,pass`.
#[derive(Debug, Clone)]
pub struct TrialRow {
    pub suite: &'static str,
    pub trial: usize,
    pub seed: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub const CSV_HEADER: &str = "suite,trial,seed,lhs,rhs,gap,tolerance,pass";

impl TrialRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.suite, self.trial, self.seed, self.lhs, self.rhs, self.gap, self.tolerance,
            self.pass
        )
    }
}

pub fn emit_json<T: Serialize>(report: &RunReport<T>, path: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::Input(format!("serializing report: {}", e)))?;
    text.push('\n');
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {}", p.display(), e))),
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}
