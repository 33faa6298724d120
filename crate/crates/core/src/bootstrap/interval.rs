use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Closed interval with its nominal coverage `1 - 2 alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
    pub nominal: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64, nominal: f64) -> Result<Self> {
        if !(lower <= upper) {
            return Err(Error::invalid("interval lower bound exceeds upper bound"));
        }
        if !(nominal > 0.0 && nominal < 1.0) {
            return Err(Error::invalid("nominal coverage must lie in (0, 1)"));
        }
        Ok(Interval { lower, upper, nominal })
    }

    #[inline]
    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn encloses(&self, other: &Interval) -> bool {
        self.lower <= other.lower && self.upper >= other.upper
    }
}

/// Empirical quantile of sorted data, interpolating linearly between order
/// statistics placed at `(k - 1) / (n - 1)`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = p * (n - 1) as f64;
    let lo = libm::floor(h) as usize;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    let frac = h - lo as f64;
    if frac == 0.0 {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::invalid("alpha must lie in (0, 0.5)"));
    }
    Ok(())
}

/// Percentile interval `[q_alpha, q_{1-alpha}]` of already sorted samples.
pub fn percentile_interval_sorted(sorted: &[f64], alpha: f64) -> Result<Interval> {
    check_alpha(alpha)?;
    if sorted.len() < 2 {
        return Err(Error::Empty("percentile interval needs at least two samples"));
    }
    let lower = quantile_sorted(sorted, alpha);
    let upper = quantile_sorted(sorted, 1.0 - alpha);
    Interval::new(lower, upper.max(lower), 1.0 - 2.0 * alpha)
}

/// Percentile interval `[q_alpha, q_{1-alpha}]`.
pub fn percentile_interval(samples: &[f64], alpha: f64) -> Result<Interval> {
    if samples.iter().any(|v| v.is_nan()) {
        return Err(Error::invalid("samples contain NaN"));
    }
    let mut sorted: Vec<f64> = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    percentile_interval_sorted(&sorted, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let s: Vec<f64> = (1..=100).map(f64::from).collect();
        let i = percentile_interval(&s, 0.05).unwrap();
        assert!((i.lower - 5.95).abs() < 1e-12 && (i.upper - 95.05).abs() < 1e-12);
        let i = percentile_interval(&[3.0, 0.0, 2.0, 1.0], 0.25).unwrap();
        assert!((i.lower - 0.75).abs() < 1e-15 && (i.upper - 2.25).abs() < 1e-15);
        let i = percentile_interval(&[7.0; 5], 0.1).unwrap();
        assert_eq!((i.lower, i.upper), (7.0, 7.0));
        assert!((i.nominal - 0.8).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(percentile_interval(&[1.0], 0.1).is_err());
        assert!(percentile_interval(&[1.0, 2.0], 0.5).is_err());
        assert!(percentile_interval(&[1.0, 2.0], 0.0).is_err());
        assert!(Interval::new(2.0, 1.0, 0.9).is_err());
    }
}
