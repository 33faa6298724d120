use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{BasisTable, MultiIndex};
use crate::input::RandomVector;
use crate::{Error, Result};

/// A truncated polynomial chaos expansion `sum_alpha c_alpha Psi_alpha(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PceModel {
    rv: RandomVector,
    indices: Vec<MultiIndex>,
    #[serde(rename = "coeffs")]
    coefficients: Vec<f64>,
    #[serde(rename = "loo", with = "crate::serde_util::inf_as_null")]
    loo_error: f64,
    #[serde(rename = "degree")]
    degree_used: u32,
}

impl PceModel {
    pub fn new(
        rv: RandomVector,
        indices: Vec<MultiIndex>,
        coefficients: Vec<f64>,
        loo_error: f64,
        degree_used: u32,
    ) -> Result<Self> {
        if indices.len() != coefficients.len() {
            return Err(Error::DimensionMismatch {
                expected: indices.len(),
                got: coefficients.len(),
            });
        }
        if let Some(bad) = indices.iter().find(|a| a.dim() != rv.dim()) {
            return Err(Error::DimensionMismatch { expected: rv.dim(), got: bad.dim() });
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("PCE coefficients must be finite"));
        }
        for (i, a) in indices.iter().enumerate() {
            if indices[..i].contains(a) {
                return Err(Error::invalid("duplicate multi-index in PCE"));
            }
        }
        Ok(PceModel { rv, indices, coefficients, loo_error, degree_used })
    }

    /// The expansion with only a constant term.
    pub fn constant(rv: RandomVector, value: f64, loo_error: f64) -> Self {
        let zero = MultiIndex::zero(rv.dim());
        PceModel {
            rv,
            indices: alloc::vec![zero],
            coefficients: alloc::vec![value],
            loo_error,
            degree_used: 0,
        }
    }

    pub fn rv(&self) -> &RandomVector {
        &self.rv
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn loo_error(&self) -> f64 {
        self.loo_error
    }

    pub fn degree_used(&self) -> u32 {
        self.degree_used
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Highest univariate degree appearing in any term.
    pub fn max_exponent(&self) -> u32 {
        self.indices.iter().map(MultiIndex::max_exponent).max().unwrap_or(0)
    }

    pub fn coefficient_of(&self, index: &MultiIndex) -> Option<f64> {
        self.indices.iter().position(|a| a == index).map(|i| self.coefficients[i])
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        let table = BasisTable::new(&self.rv, x, self.max_exponent())?;
        Ok(self.predict_table(&table))
    }

    /// Evaluate on a precomputed table; the table must cover [`Self::max_exponent`].
    pub fn predict_table(&self, table: &BasisTable) -> f64 {
        self.indices
            .iter()
            .zip(&self.coefficients)
            .map(|(a, c)| c * table.eval(a))
            .sum()
    }

    /// `c_0`, the coefficient of the constant term (zero when absent).
    pub fn mean(&self) -> f64 {
        self.indices
            .iter()
            .position(MultiIndex::is_zero)
            .map_or(0.0, |i| self.coefficients[i])
    }

    /// Sum of squared non-constant coefficients.
    pub fn variance(&self) -> f64 {
        self.indices
            .iter()
            .zip(&self.coefficients)
            .filter(|(a, _)| !a.is_zero())
            .map(|(_, c)| c * c)
            .sum()
    }

    pub fn std(&self) -> f64 {
        libm::sqrt(self.variance())
    }

    pub fn moments(&self) -> (f64, f64) {
        (self.mean(), self.variance())
    }
}
