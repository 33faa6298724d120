//! Bootstrap ensembles of multi-fidelity models, percentile confidence
//! intervals, noise inference and prediction intervals.
//!
//! HF and LF data sets are resampled with replacement independently and
//! paired by replicate index. Each replicate has its own random stream, so
//! replicates can be trained in any order or in parallel
//! ([`BootstrapPlan::train_replicate`]) with identical results.

mod interval;
mod noise;

pub use interval::{percentile_interval, percentile_interval_sorted, quantile_sorted, Interval};
pub use noise::{fit_noise, mle_parameter, BicScores, NoiseFamily, NoiseModel};

use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::fusion::{self, LowFidelity, LowFidelitySource, MfConfig, MfModel};
use crate::input::RandomVector;
use crate::math;
use crate::pce::{train_adaptive, BasisTable, ExperimentalDesign, PceModel};
use crate::rng::{self, domain};
use crate::{Error, Result};

pub const DEFAULT_N_B: usize = 1000;

#[derive(Debug, Clone)]
enum LfBase {
    /// Analytic model or pre-trained surrogate: nothing to resample.
    Fixed(LowFidelity),
    Design(ExperimentalDesign),
}

/// Everything needed to train replicates independently.
#[derive(Debug, Clone)]
pub struct BootstrapPlan {
    hf: ExperimentalDesign,
    lf: LfBase,
    rv: RandomVector,
    config: MfConfig,
    n_b: usize,
    seed: u64,
}

/// One trained replicate with its resampling provenance.
#[derive(Debug, Clone)]
pub struct Replicate {
    pub model: MfModel,
    pub hf_indices: Vec<usize>,
    pub lf_indices: Option<Vec<usize>>,
}

fn resample(n: usize, seed: u64, dom: u64, j: usize) -> Vec<usize> {
    let mut r = rng::stream(seed, dom, j as u64);
    (0..n).map(|_| r.random_range(0..n)).collect()
}

impl BootstrapPlan {
    pub fn new(
        hf_ed: &ExperimentalDesign,
        source: &LowFidelitySource,
        rv: &RandomVector,
        config: &MfConfig,
        n_b: usize,
        seed: u64,
    ) -> Result<Self> {
        if n_b < 2 {
            return Err(Error::invalid("the ensemble needs at least two replicates"));
        }
        if hf_ed.is_empty() {
            return Err(Error::Empty("HF experimental design is empty"));
        }
        rv.check_dim(&hf_ed.inputs[0])?;
        config.lf.validate()?;
        config.delta.validate()?;
        let lf = match source {
            LowFidelitySource::Analytic(m) => LfBase::Fixed(LowFidelity::Analytic(m.clone())),
            LowFidelitySource::Surrogate(p) => LfBase::Fixed(LowFidelity::Pce(p.clone())),
            LowFidelitySource::Design(ed) => {
                if ed.is_empty() {
                    return Err(Error::Empty("LF experimental design is empty"));
                }
                LfBase::Design(ed.clone())
            }
            LowFidelitySource::Sampled { model, n } => {
                LfBase::Design(fusion::sample_lf_design(model, rv, *n, seed)?)
            }
        };
        Ok(BootstrapPlan { hf: hf_ed.clone(), lf, rv: rv.clone(), config: *config, n_b, seed })
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    pub fn hf_indices(&self, j: usize) -> Vec<usize> {
        resample(self.hf.len(), self.seed, domain::BOOTSTRAP_HF, j)
    }

    pub fn lf_indices(&self, j: usize) -> Option<Vec<usize>> {
        match &self.lf {
            LfBase::Design(ed) => Some(resample(ed.len(), self.seed, domain::BOOTSTRAP_LF, j)),
            LfBase::Fixed(_) => None,
        }
    }

    /// Train replicate `j`. Degenerate resamples give a constant model at
    /// the mean of the resampled HF outputs instead of an error.
    pub fn train_replicate(&self, j: usize) -> Replicate {
        let hf_indices = self.hf_indices(j);
        let lf_indices = self.lf_indices(j);
        let hf = self.hf.subset(&hf_indices);
        let lf = match (&self.lf, &lf_indices) {
            (LfBase::Design(ed), Some(idx)) => {
                let sub = ed.subset(idx);
                let pce = train_adaptive(&sub, &self.rv, &self.config.lf).unwrap_or_else(|_| {
                    PceModel::constant(self.rv.clone(), math::mean(&sub.outputs), f64::INFINITY)
                });
                LowFidelity::Pce(pce)
            }
            (LfBase::Fixed(lf), _) => lf.clone(),
            (LfBase::Design(_), None) => unreachable!("LF indices exist for designs"),
        };
        let model = match fusion::train_mf_prepared(&hf, lf.clone(), &self.rv, &self.config) {
            Ok(m) => m,
            Err(_) => MfModel::constant(lf, self.rv.clone(), math::mean(&hf.outputs)),
        };
        Replicate { model, hf_indices, lf_indices }
    }

    /// Collect replicates (in index order) into an ensemble.
    pub fn assemble(self, replicates: Vec<Replicate>) -> Result<BootstrapEnsemble> {
        if replicates.len() != self.n_b {
            return Err(Error::DimensionMismatch { expected: self.n_b, got: replicates.len() });
        }
        let mut models = Vec::with_capacity(self.n_b);
        let mut hf_indices = Vec::with_capacity(self.n_b);
        let mut lf_indices = Vec::with_capacity(self.n_b);
        for r in replicates {
            models.push(r.model);
            hf_indices.push(r.hf_indices);
            if let Some(l) = r.lf_indices {
                lf_indices.push(l);
            }
        }
        let base_lf = match self.lf {
            LfBase::Design(ed) => Some(ed),
            LfBase::Fixed(_) => None,
        };
        Ok(BootstrapEnsemble {
            models,
            hf_indices,
            lf_indices: base_lf.as_ref().map(|_| lf_indices),
            base_hf: self.hf,
            base_lf,
            seed: self.seed,
        })
    }
}

/// `n_b` multi-fidelity models trained on paired bootstrap resamples.
/// Resampling indices are zero-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapEnsemble {
    pub models: Vec<MfModel>,
    pub hf_indices: Vec<Vec<usize>>,
    pub lf_indices: Option<Vec<Vec<usize>>>,
    pub base_hf: ExperimentalDesign,
    pub base_lf: Option<ExperimentalDesign>,
    pub seed: u64,
}

/// Train the whole ensemble sequentially.
pub fn bootstrap_ensemble(
    hf_ed: &ExperimentalDesign,
    source: &LowFidelitySource,
    rv: &RandomVector,
    config: &MfConfig,
    n_b: usize,
    seed: u64,
) -> Result<BootstrapEnsemble> {
    let plan = BootstrapPlan::new(hf_ed, source, rv, config, n_b, seed)?;
    let reps = (0..n_b).map(|j| plan.train_replicate(j)).collect();
    plan.assemble(reps)
}

/// Mean prediction and intervals at one point for several alphas.
#[derive(Debug, Clone, PartialEq)]
pub struct PointIntervals {
    pub mean: f64,
    pub ci: Vec<Interval>,
    pub pi: Vec<Interval>,
}

/// Noise draws for the PI at point `point`: one per ensemble member, from a
/// stream that does not touch the ensemble's own randomness.
pub fn noise_draws(noise: &NoiseModel, seed: u64, point: u64, n: usize) -> Vec<f64> {
    if noise.is_degenerate() {
        return alloc::vec![0.0; n];
    }
    let mut r = rng::stream(seed, domain::PI_NOISE, point);
    (0..n).map(|_| noise.quantile(rng::open_unit(&mut r))).collect()
}

impl BootstrapEnsemble {
    pub fn n_b(&self) -> usize {
        self.models.len()
    }

    pub fn rv(&self) -> &RandomVector {
        self.models[0].rv()
    }

    /// Predictions of every member at `x`.
    pub fn predictions(&self, x: &[f64]) -> Result<Vec<f64>> {
        let rv = self.rv();
        let max_degree = self.models.iter().map(MfModel::max_exponent).max().unwrap_or(0);
        let table = BasisTable::new(rv, x, max_degree)?;
        let analytic = self.models.iter().find_map(|m| match &m.lf {
            LowFidelity::Analytic(a) if m.merged.is_none() => Some(a.eval(x)),
            _ => None,
        });
        Ok(self.models.iter().map(|m| m.predict_table(&table, analytic)).collect())
    }

    /// Average of the member predictions.
    pub fn bootstrap_mean(&self, x: &[f64]) -> Result<f64> {
        Ok(math::mean(&self.predictions(x)?))
    }

    pub fn confidence_interval(&self, x: &[f64], alpha: f64) -> Result<Interval> {
        percentile_interval(&self.predictions(x)?, alpha)
    }

    /// `y_H - mu*(x_H)` on `hf_ed`.
    pub fn residuals(&self, hf_ed: &ExperimentalDesign) -> Result<Vec<f64>> {
        hf_ed.inputs.iter().zip(&hf_ed.outputs).map(|(x, y)| Ok(y - self.bootstrap_mean(x)?)).collect()
    }

    /// Percentile interval of member predictions plus one fresh noise draw
    /// each. `point` selects the noise stream so each query point gets
    /// independent draws.
    pub fn prediction_interval(
        &self,
        noise: &NoiseModel,
        x: &[f64],
        alpha: f64,
        seed: u64,
        point: u64,
    ) -> Result<Interval> {
        let mut p = self.predictions(x)?;
        for (v, e) in p.iter_mut().zip(noise_draws(noise, seed, point, self.n_b())) {
            *v += e;
        }
        percentile_interval(&p, alpha)
    }

    /// Mean, CIs and (when `noise` is given) PIs for all `alphas` at once.
    pub fn intervals(
        &self,
        x: &[f64],
        alphas: &[f64],
        noise: Option<&NoiseModel>,
        seed: u64,
        point: u64,
    ) -> Result<PointIntervals> {
        let mut p = self.predictions(x)?;
        if p.iter().any(|v| v.is_nan()) {
            return Err(Error::Degenerate("ensemble prediction is NaN"));
        }
        let mean = math::mean(&p);
        let mut sorted = p.clone();
        sorted.sort_by(f64::total_cmp);
        let ci = alphas
            .iter()
            .map(|&a| percentile_interval_sorted(&sorted, a))
            .collect::<Result<Vec<_>>>()?;
        let pi = match noise {
            Some(noise) => {
                for (v, e) in p.iter_mut().zip(noise_draws(noise, seed, point, self.n_b())) {
                    *v += e;
                }
                p.sort_by(f64::total_cmp);
                alphas
                    .iter()
                    .map(|&a| percentile_interval_sorted(&p, a))
                    .collect::<Result<Vec<_>>>()?
            }
            None => Vec::new(),
        };
        Ok(PointIntervals { mean, ci, pi })
    }

    /// Residuals on the base HF design and the noise model fitted to them.
    pub fn fit_noise(&self) -> Result<NoiseModel> {
        fit_noise(&self.residuals(&self.base_hf)?)
    }
}
