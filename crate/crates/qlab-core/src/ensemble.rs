//! Ensembles of weighted pure states and joint distributions over two
//! letter alphabets.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::state::PureState;

const WEIGHT_SUM_TOL: f64 = 1e-12;

fn check_weights(weights: &[f64], tol: f64) -> Result<()> {
    let mut sum = 0.0;
    for &w in weights {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidDistribution { reason: String::from("negative or non-finite weight") });
        }
        sum += w;
    }
    if (sum - 1.0).abs() > tol {
        return Err(Error::InvalidDistribution { reason: String::from("weights do not sum to 1") });
    }
    Ok(())
}

/// Weighted collection of pure states on a common dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    dim: usize,
    weights: Vec<f64>,
    states: Vec<PureState>,
}

impl Ensemble {
    pub fn new(weights: Vec<f64>, states: Vec<PureState>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Empty { what: "ensemble" });
        }
        if weights.len() != states.len() {
            return Err(Error::LengthMismatch { expected: states.len(), found: weights.len() });
        }
        let dim = states[0].dim();
        for s in &states {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: s.dim() });
            }
        }
        check_weights(&weights, WEIGHT_SUM_TOL)?;
        Ok(Ensemble { dim, weights, states })
    }

    pub fn uniform(states: Vec<PureState>) -> Result<Self> {
        let n = states.len();
        if n == 0 {
            return Err(Error::Empty { what: "ensemble" });
        }
        let w = 1.0 / n as f64;
        Ensemble::new(alloc::vec![w; n], states)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn state(&self, i: usize) -> &PureState {
        &self.states[i]
    }

    /// Same states under a different prior.
    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Ensemble> {
        Ensemble::new(weights, self.states.clone())
    }
}

/// Nonnegative matrix of probabilities p[i][j] summing to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    rows: usize,
    cols: usize,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(rows: usize, cols: usize, probs: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || probs.len() != rows * cols {
            return Err(Error::LengthMismatch { expected: rows * cols, found: probs.len() });
        }
        check_weights(&probs, WEIGHT_SUM_TOL)?;
        Ok(JointDistribution { rows, cols, probs })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn prob(&self, i: usize, j: usize) -> f64 {
        self.probs[i * self.cols + j]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Row marginal p_i = sum_j p_ij.
    pub fn marginal_rows(&self) -> Vec<f64> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.prob(i, j)).sum()).collect()
    }

    /// Column marginal q_j = sum_i p_ij.
    pub fn marginal_cols(&self) -> Vec<f64> {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self.prob(i, j)).sum()).collect()
    }

    /// Transposed distribution, swapping the two alphabets.
    pub fn transposed(&self) -> JointDistribution {
        let mut probs = Vec::with_capacity(self.probs.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                probs.push(self.prob(i, j));
            }
        }
        JointDistribution { rows: self.cols, cols: self.rows, probs }
    }
}
