//! JSON input formats. Complex entries are `[re, im]` pairs; matrices are
//! row-major nested arrays of such pairs.

use std::fs;
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::Deserialize;

use qlab_core::channel::CpMap;
use qlab_core::ensemble::{Ensemble, JointDistribution};
use qlab_core::mat::Mat;
use qlab_core::povm::HermitianOp;
use qlab_core::state::PureState;

use crate::CliError;

/// How far an input state's norm may drift from 1 before the file is
/// rejected instead of silently renormalized.
const NORM_SLACK: f64 = 1e-6;

pub type ComplexPair = [f64; 2];
pub type MatrixFile = Vec<Vec<ComplexPair>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleFile {
    pub dim: usize,
    pub states: Vec<Vec<ComplexPair>>,
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
}

fn input_err(msg: String) -> CliError {
    CliError::Input(msg)
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| input_err(format!("cannot read {}: {}", path.display(), e)))?;
    serde_json::from_str(&text)
        .map_err(|e| input_err(format!("{}: {}", path.display(), e)))
}

fn parse_state(dim: usize, index: usize, entries: &[ComplexPair]) -> Result<PureState, CliError> {
    if entries.len() != dim {
        return Err(input_err(format!(
            "states[{}]: expected {} amplitudes, found {}",
            index,
            dim,
            entries.len()
        )));
    }
    let amps: Vec<C64> = entries.iter().map(|&[re, im]| C64::new(re, im)).collect();
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !norm.is_finite() || (norm - 1.0).abs() > NORM_SLACK {
        return Err(input_err(format!(
            "states[{}]: norm {} is not within {} of 1",
            index, norm, NORM_SLACK
        )));
    }
    PureState::new(amps)
        .map_err(|e| input_err(format!("states[{}]: {}", index, e)))
}

impl EnsembleFile {
    pub fn into_ensemble(self) -> Result<Ensemble, CliError> {
        if self.dim == 0 {
            return Err(input_err("dim: must be positive".into()));
        }
        if self.states.is_empty() {
            return Err(input_err("states: list is empty".into()));
        }
        let states = self
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| parse_state(self.dim, i, s))
            .collect::<Result<Vec<_>, _>>()?;
        match self.weights {
            None => Ensemble::uniform(states).map_err(|e| input_err(format!("states: {}", e))),
            Some(w) => {
                if w.len() != states.len() {
                    return Err(input_err(format!(
                        "weights: expected {} entries, found {}",
                        states.len(),
                        w.len()
                    )));
                }
                Ensemble::new(w, states).map_err(|e| input_err(format!("weights: {}", e)))
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "representation", rename_all = "lowercase", deny_unknown_fields)]
pub enum ChannelFile {
    Kraus {
        in_dim: usize,
        out_dim: usize,
        operators: Vec<MatrixFile>,
    },
    Holevo {
        in_dim: usize,
        out_dim: usize,
        pairs: Vec<HolevoPairFile>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolevoPairFile {
    pub output: MatrixFile,
    pub measured: MatrixFile,
}

pub fn parse_matrix(
    what: &str,
    rows: usize,
    cols: usize,
    m: &MatrixFile,
) -> Result<Mat, CliError> {
    if m.len() != rows {
        return Err(input_err(format!("{}: expected {} rows, found {}", what, rows, m.len())));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for (r, row) in m.iter().enumerate() {
        if row.len() != cols {
            return Err(input_err(format!(
                "{} row {}: expected {} columns, found {}",
                what,
                r,
                cols,
                row.len()
            )));
        }
        for &[re, im] in row {
            if !re.is_finite() || !im.is_finite() {
                return Err(input_err(format!("{} row {}: non-finite entry", what, r)));
            }
            data.push(C64::new(re, im));
        }
    }
    Ok(Mat::from_rows(rows, cols, data))
}

impl ChannelFile {
    pub fn into_map(self) -> Result<CpMap, CliError> {
        match self {
            ChannelFile::Kraus { in_dim, out_dim, operators } => {
                let ops = operators
                    .iter()
                    .enumerate()
                    .map(|(k, m)| parse_matrix(&format!("operators[{}]", k), out_dim, in_dim, m))
                    .collect::<Result<Vec<_>, _>>()?;
                CpMap::kraus(in_dim, out_dim, ops)
                    .map_err(|e| input_err(format!("operators: {}", e)))
            }
            ChannelFile::Holevo { in_dim, out_dim, pairs } => {
                let terms = pairs
                    .iter()
                    .enumerate()
                    .map(|(k, p)| {
                        let r = parse_matrix(
                            &format!("pairs[{}].output", k),
                            out_dim,
                            out_dim,
                            &p.output,
                        )?;
                        let x = parse_matrix(
                            &format!("pairs[{}].measured", k),
                            in_dim,
                            in_dim,
                            &p.measured,
                        )?;
                        let r = HermitianOp::symmetrized(r)
                            .map_err(|e| input_err(format!("pairs[{}].output: {}", k, e)))?;
                        let x = HermitianOp::symmetrized(x)
                            .map_err(|e| input_err(format!("pairs[{}].measured: {}", k, e)))?;
                        Ok((r, x))
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                CpMap::holevo(in_dim, out_dim, terms)
                    .map_err(|e| input_err(format!("pairs: {}", e)))
            }
        }
    }
}

/// Joint distribution over two explicit state lists, for two-factor
/// verification fixtures.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointFile {
    pub dim1: usize,
    pub dim2: usize,
    pub probs: Vec<Vec<f64>>,
    pub states1: Vec<Vec<ComplexPair>>,
    pub states2: Vec<Vec<ComplexPair>>,
}

impl JointFile {
    pub fn into_parts(
        self,
    ) -> Result<(JointDistribution, Vec<PureState>, Vec<PureState>), CliError> {
        let rows = self.states1.len();
        let cols = self.states2.len();
        if self.probs.len() != rows {
            return Err(input_err(format!(
                "probs: expected {} rows, found {}",
                rows,
                self.probs.len()
            )));
        }
        let mut flat = Vec::with_capacity(rows * cols);
        for (r, row) in self.probs.iter().enumerate() {
            if row.len() != cols {
                return Err(input_err(format!(
                    "probs row {}: expected {} columns, found {}",
                    r,
                    cols,
                    row.len()
                )));
            }
            flat.extend_from_slice(row);
        }
        let states1 = self
            .states1
            .iter()
            .enumerate()
            .map(|(i, s)| parse_state(self.dim1, i, s))
            .collect::<Result<Vec<_>, _>>()?;
        let states2 = self
            .states2
            .iter()
            .enumerate()
            .map(|(i, s)| parse_state(self.dim2, i, s))
            .collect::<Result<Vec<_>, _>>()?;
        let joint = JointDistribution::new(rows, cols, flat)
            .map_err(|e| input_err(format!("probs: {}", e)))?;
        Ok((joint, states1, states2))
    }
}
