//! Convergence and coverage studies.
//!
//! Every replication draws its own HF and LF designs and noise from streams
//! derived from the study seed and the replication index, and all
//! replications share one noise-free test set. Replications (and the points
//! inside one coverage evaluation) are independent, so front-ends may run
//! them in parallel and still get identical tables.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::BenchmarkPair;
use crate::bootstrap::{BootstrapEnsemble, BootstrapPlan, NoiseModel};
use crate::fusion::{self, LowFidelity, LowFidelitySource, MfConfig};
use crate::math;
use crate::metrics::{self, CoverageReport};
use crate::pce::{train_adaptive, BasisTable, ExperimentalDesign};
use crate::rng::{self, derive_seed, domain};
use crate::{Error, Result};

/// `n` draws of `N(0, std^2)` from stream `(seed, HF_NOISE, index)`.
pub fn gaussian_noise(std: f64, seed: u64, index: u64, n: usize) -> Vec<f64> {
    if std == 0.0 {
        return alloc::vec![0.0; n];
    }
    let mut r = rng::stream(seed, domain::HF_NOISE, index);
    (0..n).map(|_| std * math::norm_ppf(rng::open_unit(&mut r))).collect()
}

/// Standard deviation of a PCE trained on `n` noise-free LHS evaluations of
/// the HF model.
pub fn reference_std(pair: &BenchmarkPair, n: usize, seed: u64) -> Result<f64> {
    let x = pair.rv.lhs_sample(n, derive_seed(seed, domain::LHS, 0))?;
    let ed = ExperimentalDesign::from_model(x, |x| pair.hf.eval(x))?;
    Ok(train_adaptive(&ed, &pair.rv, &pair.pce)?.std())
}

/// Pearson correlation and NRMSE between HF and LF on `n` shared LHS points.
pub fn fidelity_relation(pair: &BenchmarkPair, n: usize, seed: u64) -> Result<(f64, f64)> {
    let x = pair.rv.lhs_sample(n, derive_seed(seed, domain::LHS, 0))?;
    let h: Vec<f64> = x.iter().map(|x| pair.hf.eval(x)).collect();
    let l: Vec<f64> = x.iter().map(|x| pair.lf.eval(x)).collect();
    metrics::pearson_nrmse(&h, &l)
}

fn test_set(pair: &BenchmarkPair, n: usize, seed: u64) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let x = pair.rv.lhs_sample(n, derive_seed(seed, domain::TEST_SET, 0))?;
    let y = x.iter().map(|x| pair.hf.eval(x)).collect();
    Ok((x, y))
}

fn noisy_hf_design(
    pair: &BenchmarkPair,
    n: usize,
    noise_std: f64,
    seed: u64,
    cell: u64,
) -> Result<ExperimentalDesign> {
    let x = pair.rv.lhs_sample(n, derive_seed(seed, domain::TRAIN, cell))?;
    let eps = gaussian_noise(noise_std, seed, cell, n);
    let y = x.iter().zip(&eps).map(|(x, e)| pair.hf.eval(x) + e).collect();
    ExperimentalDesign::new(x, y)
}

fn lf_design(pair: &BenchmarkPair, n: usize, seed: u64, rep: u64) -> Result<ExperimentalDesign> {
    let x = pair.rv.lhs_sample(n, derive_seed(seed, domain::LF_DESIGN, rep))?;
    ExperimentalDesign::from_model(x, |x| pair.lf.eval(x))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceConfig {
    pub hf_sizes: Vec<usize>,
    pub n_lf: usize,
    /// Absolute standard deviation of the Gaussian HF noise.
    pub noise_std: f64,
    pub n_rep: usize,
    pub n_test: usize,
    pub seed: u64,
    pub mf: MfConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub size: usize,
    pub replication: usize,
    pub eps_mf: f64,
    pub eps_hf: f64,
    pub eps_lf: f64,
}

/// Validation errors of the MF model, an HF-only PCE and an LF-only PCE for
/// several HF design sizes.
pub struct ConvergenceStudy<'a> {
    pair: &'a BenchmarkPair,
    config: ConvergenceConfig,
    truth: Vec<f64>,
    tables: Vec<BasisTable>,
}

impl<'a> ConvergenceStudy<'a> {
    pub fn new(pair: &'a BenchmarkPair, config: ConvergenceConfig) -> Result<Self> {
        if config.hf_sizes.is_empty() {
            return Err(Error::Empty("no HF design sizes"));
        }
        if config.n_lf == 0 || config.n_rep == 0 {
            return Err(Error::invalid("LF design size and replications must be positive"));
        }
        config.mf.lf.validate()?;
        config.mf.delta.validate()?;
        let (x, truth) = test_set(pair, config.n_test, config.seed)?;
        let degree = config.mf.lf.max_degree.max(config.mf.delta.max_degree);
        let tables =
            x.iter().map(|x| BasisTable::new(&pair.rv, x, degree)).collect::<Result<Vec<_>>>()?;
        Ok(ConvergenceStudy { pair, config, truth, tables })
    }

    pub fn config(&self) -> &ConvergenceConfig {
        &self.config
    }

    fn eps(&self, predict: impl Fn(&BasisTable) -> f64) -> Result<f64> {
        let pred: Vec<f64> = self.tables.iter().map(predict).collect();
        metrics::validation_error(&pred, &self.truth)
    }

    /// All sizes for replication `rep`; the LF design is shared across sizes.
    pub fn run_replication(&self, rep: usize) -> Result<Vec<ConvergenceRow>> {
        let c = &self.config;
        let rv = &self.pair.rv;
        let lf_ed = lf_design(self.pair, c.n_lf, c.seed, rep as u64)?;
        let lf_pce = train_adaptive(&lf_ed, rv, &c.mf.lf)?;
        let eps_lf = self.eps(|t| lf_pce.predict_table(t))?;
        let lf = LowFidelity::Pce(lf_pce);
        c.hf_sizes
            .iter()
            .map(|&size| {
                let cell = ((rep as u64) << 32) | size as u64;
                let ed = noisy_hf_design(self.pair, size, c.noise_std, c.seed, cell)?;
                let hf = train_adaptive(&ed, rv, &c.mf.delta)?;
                let mf = fusion::train_mf_prepared(&ed, lf.clone(), rv, &c.mf)?;
                Ok(ConvergenceRow {
                    size,
                    replication: rep,
                    eps_mf: self.eps(|t| mf.predict_table(t, None))?,
                    eps_hf: self.eps(|t| hf.predict_table(t))?,
                    eps_lf,
                })
            })
            .collect()
    }

    /// Rows ordered by replication, then size.
    pub fn run(&self) -> Result<Vec<ConvergenceRow>> {
        let mut rows = Vec::new();
        for rep in 0..self.config.n_rep {
            rows.extend(self.run_replication(rep)?);
        }
        Ok(rows)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageConfig {
    pub n_h: usize,
    /// LF design size; 0 uses the LF model analytically.
    pub n_lf: usize,
    pub noise_std: f64,
    pub levels: Vec<f64>,
    pub n_rep: usize,
    pub n_b: usize,
    pub n_test: usize,
    pub seed: u64,
    pub mf: MfConfig,
}

/// Per-level coverages of one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationCoverage {
    pub replication: usize,
    pub ci: Vec<f64>,
    pub pi: Vec<f64>,
    pub noise: NoiseModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageStudyResult {
    pub reports: Vec<CoverageReport>,
    pub replications: Vec<ReplicationCoverage>,
}

/// Bootstrap CI/PI coverage on a noise-free (CI) and a freshly noisy (PI)
/// test set, averaged over replications.
pub struct CoverageStudy<'a> {
    pair: &'a BenchmarkPair,
    config: CoverageConfig,
    alphas: Vec<f64>,
    test_x: Vec<Vec<f64>>,
    truth: Vec<f64>,
}

impl<'a> CoverageStudy<'a> {
    pub fn new(pair: &'a BenchmarkPair, config: CoverageConfig) -> Result<Self> {
        if config.levels.is_empty() || config.levels.iter().any(|l| !(*l > 0.0 && *l < 1.0)) {
            return Err(Error::invalid("nominal levels must lie in (0, 1)"));
        }
        if config.n_rep == 0 || config.n_test == 0 || config.n_h == 0 {
            return Err(Error::invalid("sizes and replications must be positive"));
        }
        let alphas = config.levels.iter().map(|l| (1.0 - l) / 2.0).collect();
        let (test_x, truth) = test_set(pair, config.n_test, config.seed)?;
        Ok(CoverageStudy { pair, config, alphas, test_x, truth })
    }

    pub fn config(&self) -> &CoverageConfig {
        &self.config
    }

    pub fn n_test(&self) -> usize {
        self.test_x.len()
    }

    /// Training data and the bootstrap plan of replication `rep`.
    pub fn plan(&self, rep: usize) -> Result<BootstrapPlan> {
        let c = &self.config;
        let hf = noisy_hf_design(self.pair, c.n_h, c.noise_std, c.seed, rep as u64)?;
        let source = if c.n_lf == 0 {
            LowFidelitySource::Analytic(self.pair.lf.clone())
        } else {
            LowFidelitySource::Design(lf_design(self.pair, c.n_lf, c.seed, rep as u64)?)
        };
        let seed = derive_seed(c.seed, domain::STUDY, rep as u64);
        BootstrapPlan::new(&hf, &source, &self.pair.rv, &c.mf, c.n_b, seed)
    }

    fn truth_noise(&self, rep: usize) -> Vec<f64> {
        gaussian_noise(self.config.noise_std, self.config.seed, (1u64 << 40) | rep as u64, self.n_test())
    }

    /// Membership of test point `i` in its CI and PI, per level.
    pub fn point_hits(
        &self,
        rep: usize,
        ens: &BootstrapEnsemble,
        noise: &NoiseModel,
        truth_noise: &[f64],
        i: usize,
    ) -> Result<(Vec<bool>, Vec<bool>)> {
        let pi_seed = derive_seed(self.config.seed, domain::PI_NOISE, rep as u64);
        let r = ens.intervals(&self.test_x[i], &self.alphas, Some(noise), pi_seed, i as u64)?;
        let t = self.truth[i];
        Ok((
            r.ci.iter().map(|c| c.contains(t)).collect(),
            r.pi.iter().map(|p| p.contains(t + truth_noise[i])).collect(),
        ))
    }

    /// Coverages of replication `rep` given its trained ensemble, with a
    /// caller-supplied map over test points (sequential or parallel).
    pub fn evaluate_with<F>(&self, rep: usize, ens: &BootstrapEnsemble, map: F) -> Result<ReplicationCoverage>
    where
        F: FnOnce(&(dyn Fn(usize) -> Result<(Vec<bool>, Vec<bool>)> + Sync)) -> Result<Vec<(Vec<bool>, Vec<bool>)>>,
    {
        let noise = ens.fit_noise()?;
        let eps = self.truth_noise(rep);
        let hits = map(&|i| self.point_hits(rep, ens, &noise, &eps, i))?;
        let k = self.alphas.len();
        let n = hits.len() as f64;
        let mut ci = alloc::vec![0usize; k];
        let mut pi = alloc::vec![0usize; k];
        for (c, p) in &hits {
            for j in 0..k {
                ci[j] += c[j] as usize;
                pi[j] += p[j] as usize;
            }
        }
        Ok(ReplicationCoverage {
            replication: rep,
            ci: ci.into_iter().map(|v| v as f64 / n).collect(),
            pi: pi.into_iter().map(|v| v as f64 / n).collect(),
            noise,
        })
    }

    pub fn evaluate(&self, rep: usize, ens: &BootstrapEnsemble) -> Result<ReplicationCoverage> {
        let n = self.n_test();
        self.evaluate_with(rep, ens, |f| (0..n).map(f).collect())
    }

    /// One report per nominal level.
    pub fn summarize(&self, replications: Vec<ReplicationCoverage>) -> Result<CoverageStudyResult> {
        let reports = self
            .config
            .levels
            .iter()
            .enumerate()
            .map(|(j, &level)| {
                let ci: Vec<f64> = replications.iter().map(|r| r.ci[j]).collect();
                let pi: Vec<f64> = replications.iter().map(|r| r.pi[j]).collect();
                CoverageReport::from_coverages(level, Some(&ci), &pi, self.n_test())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CoverageStudyResult { reports, replications })
    }

    /// Sequential run of all replications.
    pub fn run(&self) -> Result<CoverageStudyResult> {
        let mut reps = Vec::with_capacity(self.config.n_rep);
        for rep in 0..self.config.n_rep {
            let plan = self.plan(rep)?;
            let trained = (0..plan.n_b()).map(|j| plan.train_replicate(j)).collect();
            let ens = plan.assemble(trained)?;
            reps.push(self.evaluate(rep, &ens)?);
        }
        self.summarize(reps)
    }
}
