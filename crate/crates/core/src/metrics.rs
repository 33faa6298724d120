//! Accuracy and interval-reliability metrics.

use alloc::format;
use alloc::string::String;

use serde::{Deserialize, Serialize};

use crate::bootstrap::Interval;
use crate::math;
use crate::{Error, Result};

/// `sum (y - y_hat)^2 / sum (y - mean(y))^2`.
pub fn validation_error(pred: &[f64], truth: &[f64]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::DimensionMismatch { expected: truth.len(), got: pred.len() });
    }
    if truth.len() < 2 {
        return Err(Error::Empty("need at least two validation points"));
    }
    let mu = math::mean(truth);
    let num = math::sum(pred.iter().zip(truth).map(|(p, t)| (t - p) * (t - p)));
    let den = math::sum(truth.iter().map(|t| (t - mu) * (t - mu)));
    if !(den > 0.0) {
        return Err(Error::Degenerate("validation truth is constant"));
    }
    Ok(num / den)
}

/// Fraction of `truth` values inside their (closed) interval.
pub fn coverage_probability(intervals: &[Interval], truth: &[f64]) -> Result<f64> {
    if intervals.len() != truth.len() {
        return Err(Error::DimensionMismatch { expected: truth.len(), got: intervals.len() });
    }
    if truth.is_empty() {
        return Err(Error::Empty("no coverage points"));
    }
    let hits = intervals.iter().zip(truth).filter(|(i, &t)| i.contains(t)).count();
    Ok(hits as f64 / truth.len() as f64)
}

pub fn mean_coverage(per_rep: &[f64]) -> Result<f64> {
    if per_rep.is_empty() {
        return Err(Error::Empty("no replications"));
    }
    Ok(math::mean(per_rep))
}

/// Average coverage error; positive means over-coverage.
pub fn ace(coverage: f64, nominal: f64) -> f64 {
    coverage - nominal
}

/// Pearson correlation of `(a, b)` and `RMS(a - b) / std(a)` with the
/// population standard deviation.
pub fn pearson_nrmse(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    if a.len() < 2 {
        return Err(Error::Empty("need at least two points"));
    }
    let (ma, mb) = (math::mean(a), math::mean(b));
    let saa = math::sum(a.iter().map(|v| (v - ma) * (v - ma)));
    let sbb = math::sum(b.iter().map(|v| (v - mb) * (v - mb)));
    let sab = math::sum(a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)));
    if !(saa > 0.0) {
        return Err(Error::Degenerate("reference sample is constant"));
    }
    let corr = if sbb > 0.0 { sab / libm::sqrt(saa * sbb) } else { 0.0 };
    let mse = math::sum(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)));
    let nrmse = libm::sqrt(mse / saa);
    Ok((corr, nrmse))
}

/// Coverage results for one nominal level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub nominal: f64,
    pub mcicp: Option<f64>,
    pub ace_ci: Option<f64>,
    pub mpicp: f64,
    pub ace_pi: f64,
    pub n_rep: usize,
    pub n_test: usize,
}

impl CoverageReport {
    pub fn from_coverages(
        nominal: f64,
        ci: Option<&[f64]>,
        pi: &[f64],
        n_test: usize,
    ) -> Result<Self> {
        let mcicp = ci.map(mean_coverage).transpose()?;
        let mpicp = mean_coverage(pi)?;
        Ok(CoverageReport {
            nominal,
            mcicp,
            ace_ci: mcicp.map(|c| ace(c, nominal)),
            mpicp,
            ace_pi: ace(mpicp, nominal),
            n_rep: pi.len(),
            n_test,
        })
    }

    pub const CSV_HEADER: &'static str = "nominal,MCICP,ACE_CI,MPICP,ACE_PI";

    /// Row matching [`Self::CSV_HEADER`]; missing CI columns stay empty.
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|v| format!("{v:.16e}")).unwrap_or_default();
        format!(
            "{:.16e},{},{},{:.16e},{:.16e}",
            self.nominal,
            opt(self.mcicp),
            opt(self.ace_ci),
            self.mpicp,
            self.ace_pi
        )
    }
}
