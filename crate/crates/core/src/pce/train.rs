use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{enumerate_indices, lars_path_with, loo, BasisTable, MultiIndex, PceModel, Truncation};
use crate::input::RandomVector;
use crate::linalg::Matrix;
use crate::math;
use crate::{Error, Result};

/// Input/output pairs used to train a surrogate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentalDesign {
    pub inputs: Vec<Vec<f64>>,
    pub outputs: Vec<f64>,
}

impl ExperimentalDesign {
    pub fn new(inputs: Vec<Vec<f64>>, outputs: Vec<f64>) -> Result<Self> {
        if inputs.len() != outputs.len() {
            return Err(Error::DimensionMismatch { expected: inputs.len(), got: outputs.len() });
        }
        if inputs.is_empty() {
            return Err(Error::Empty("experimental design is empty"));
        }
        let m = inputs[0].len();
        if let Some(bad) = inputs.iter().find(|x| x.len() != m) {
            return Err(Error::DimensionMismatch { expected: m, got: bad.len() });
        }
        Ok(ExperimentalDesign { inputs, outputs })
    }

    /// Evaluate `model` at every input.
    pub fn from_model(inputs: Vec<Vec<f64>>, model: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let outputs = inputs.iter().map(|x| model(x)).collect();
        Self::new(inputs, outputs)
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.inputs.first().map_or(0, Vec::len)
    }

    /// Rows `idx` (repetitions allowed).
    pub fn subset(&self, idx: &[usize]) -> Self {
        ExperimentalDesign {
            inputs: idx.iter().map(|&i| self.inputs[i].clone()).collect(),
            outputs: idx.iter().map(|&i| self.outputs[i]).collect(),
        }
    }
}

/// Degree-adaptive sparse PCE settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PceConfig {
    pub min_degree: u32,
    pub max_degree: u32,
    pub q_norm: f64,
    /// Stop after this many consecutive degrees without LOO improvement.
    pub patience: u32,
    /// Cut LARS paths once the LOO error has stalled (see [`lars_path_with`]).
    #[serde(default = "yes")]
    pub early_stop: bool,
}

fn yes() -> bool {
    true
}

impl Default for PceConfig {
    fn default() -> Self {
        PceConfig { min_degree: 1, max_degree: 15, q_norm: 1.0, patience: 2, early_stop: true }
    }
}

impl PceConfig {
    pub fn degrees(min_degree: u32, max_degree: u32, q_norm: f64) -> Self {
        PceConfig { min_degree, max_degree, q_norm, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_degree > self.max_degree {
            return Err(Error::invalid("empty degree range"));
        }
        Truncation::new(self.max_degree, self.q_norm)?;
        Ok(())
    }
}

/// Design matrix `Psi[i][j] = Psi_{indices[j]}(x_i)` from precomputed tables.
pub fn design_matrix(tables: &[BasisTable], indices: &[MultiIndex]) -> Matrix {
    let n = tables.len();
    let mut x = Matrix::zeros(n, indices.len());
    for (j, a) in indices.iter().enumerate() {
        for (v, t) in x.column_mut(j).iter_mut().zip(tables) {
            *v = t.eval(a);
        }
    }
    x
}

/// Degree-adaptive sparse PCE by hybrid LARS.
///
/// For each candidate degree the truncation set is enumerated, the LARS path
/// computed, and the path point with smallest corrected leave-one-out error
/// retained; the best over all degrees wins, ties going to the lower degree.
/// When no candidate is usable (e.g. a single observation) the constant model
/// at the sample mean is returned.
pub fn train_adaptive(
    ed: &ExperimentalDesign,
    rv: &RandomVector,
    config: &PceConfig,
) -> Result<PceModel> {
    config.validate()?;
    if ed.is_empty() {
        return Err(Error::Empty("experimental design is empty"));
    }
    let tables = ed
        .inputs
        .iter()
        .map(|x| BasisTable::new(rv, x, config.max_degree))
        .collect::<Result<Vec<_>>>()?;
    let y = &ed.outputs;
    let n = y.len();

    let mut best: Option<(f64, u32, Vec<MultiIndex>, Vec<f64>)> = None;
    let mut stale = 0;
    for degree in config.min_degree..=config.max_degree {
        let indices = enumerate_indices(rv.dim(), &Truncation::new(degree, config.q_norm)?);
        let x = design_matrix(&tables, &indices);
        let path = lars_path_with(&x, y, config.early_stop)?;
        let improved = match path.best() {
            Some(step) if step.loo.is_finite()
                && best.as_ref().is_none_or(|b| step.loo < b.0) => {
                    let mut terms: Vec<(usize, f64)> =
                        step.active.iter().copied().zip(step.coefficients.iter().copied()).collect();
                    terms.sort_by_key(|t| t.0);
                    best = Some((
                        step.loo,
                        degree,
                        terms.iter().map(|t| indices[t.0].clone()).collect(),
                        terms.iter().map(|t| t.1).collect(),
                    ));
                    true
                }
            _ => false,
        };
        if improved {
            stale = 0;
        } else {
            stale += 1;
            if stale >= config.patience {
                break;
            }
        }
    }

    match best {
        Some((loo, degree, indices, coefficients)) => {
            PceModel::new(rv.clone(), indices, coefficients, loo, degree)
        }
        None => {
            let m = math::mean(y);
            let fitted = alloc::vec![m; n];
            let leverage = alloc::vec![1.0 / n as f64; n];
            let raw = loo::loo_error_raw(y, &fitted, &leverage);
            let err = loo::corrected_loo(raw, n, 1, 1.0 / n as f64);
            Ok(PceModel::constant(rv.clone(), m, err))
        }
    }
}
