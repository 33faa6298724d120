//! Rayon drivers. Results are collected in index order, so they are
//! identical to the sequential versions in `mfpce_core` whatever the thread
//! count.

use mfpce_core::benchmarks::{
    ConvergenceRow, ConvergenceStudy, CoverageStudy, CoverageStudyResult,
};
use mfpce_core::bootstrap::{BootstrapEnsemble, BootstrapPlan, NoiseModel, PointIntervals};
use rayon::prelude::*;

use crate::Result;

/// Environment variable giving the default worker count.
pub const THREADS_ENV: &str = "MFPCE_THREADS";

/// Configure the global pool from `threads` or `MFPCE_THREADS`. Only the
/// first call has an effect.
pub fn init_threads(threads: Option<usize>) {
    let n = threads.or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok()));
    if let Some(n) = n {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

pub fn train_ensemble(plan: BootstrapPlan) -> Result<BootstrapEnsemble> {
    let reps = (0..plan.n_b()).into_par_iter().map(|j| plan.train_replicate(j)).collect();
    Ok(plan.assemble(reps)?)
}

pub fn intervals(
    ens: &BootstrapEnsemble,
    points: &[Vec<f64>],
    alphas: &[f64],
    noise: Option<&NoiseModel>,
    seed: u64,
) -> Result<Vec<PointIntervals>> {
    let out: std::result::Result<Vec<_>, _> = points
        .par_iter()
        .enumerate()
        .map(|(i, x)| ens.intervals(x, alphas, noise, seed, i as u64))
        .collect();
    Ok(out?)
}

pub fn run_convergence(study: &ConvergenceStudy<'_>) -> Result<Vec<ConvergenceRow>> {
    let per_rep: std::result::Result<Vec<_>, _> =
        (0..study.config().n_rep).into_par_iter().map(|r| study.run_replication(r)).collect();
    Ok(per_rep?.into_iter().flatten().collect())
}

/// Replications run one after the other; replicate training and test-point
/// evaluation inside each are parallel.
pub fn run_coverage(study: &CoverageStudy<'_>) -> Result<CoverageStudyResult> {
    let mut reps = Vec::with_capacity(study.config().n_rep);
    for r in 0..study.config().n_rep {
        let ens = train_ensemble(study.plan(r)?)?;
        let n = study.n_test();
        reps.push(study.evaluate_with(r, &ens, |f| (0..n).into_par_iter().map(f).collect())?);
    }
    Ok(study.summarize(reps)?)
}
