//! Zero-mean noise models fitted by maximum likelihood and ranked by BIC.

use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::math;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseFamily {
    Gaussian,
    Laplace,
    Uniform,
}

impl NoiseFamily {
    /// Candidate order; also the tie-breaking preference.
    pub const ALL: [NoiseFamily; 3] = [NoiseFamily::Gaussian, NoiseFamily::Laplace, NoiseFamily::Uniform];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BicScores {
    pub gaussian: f64,
    pub laplace: f64,
    pub uniform: f64,
}

impl BicScores {
    pub fn get(&self, family: NoiseFamily) -> f64 {
        match family {
            NoiseFamily::Gaussian => self.gaussian,
            NoiseFamily::Laplace => self.laplace,
            NoiseFamily::Uniform => self.uniform,
        }
    }
}

/// Fitted noise distribution. `parameter` is the standard deviation, the
/// Laplace scale or the uniform half-width depending on `family`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub family: NoiseFamily,
    pub parameter: f64,
    /// `None` for the degenerate all-zero case.
    pub bic: Option<BicScores>,
    pub n_residuals: usize,
}

impl NoiseModel {
    pub fn new(family: NoiseFamily, parameter: f64) -> Result<Self> {
        if !(parameter >= 0.0) || !parameter.is_finite() {
            return Err(Error::invalid("noise parameter must be finite and non-negative"));
        }
        Ok(NoiseModel { family, parameter, bic: None, n_residuals: 0 })
    }

    pub fn is_degenerate(&self) -> bool {
        self.parameter == 0.0
    }

    pub fn std(&self) -> f64 {
        match self.family {
            NoiseFamily::Gaussian => self.parameter,
            NoiseFamily::Laplace => core::f64::consts::SQRT_2 * self.parameter,
            NoiseFamily::Uniform => self.parameter / libm::sqrt(3.0),
        }
    }

    /// Inverse CDF at `p` in (0, 1).
    pub fn quantile(&self, p: f64) -> f64 {
        let s = self.parameter;
        if s == 0.0 {
            return 0.0;
        }
        match self.family {
            NoiseFamily::Gaussian => s * math::norm_ppf(p),
            NoiseFamily::Laplace => {
                if p < 0.5 {
                    s * libm::log(2.0 * p)
                } else {
                    -s * libm::log(2.0 * (1.0 - p))
                }
            }
            NoiseFamily::Uniform => s * (2.0 * p - 1.0),
        }
    }

    /// Log-likelihood of `res` under this model.
    pub fn log_likelihood(&self, res: &[f64]) -> f64 {
        let n = res.len() as f64;
        let s = self.parameter;
        match self.family {
            NoiseFamily::Gaussian => {
                let ss = math::sum(res.iter().map(|r| r * r));
                -0.5 * n * libm::log(2.0 * PI * s * s) - ss / (2.0 * s * s)
            }
            NoiseFamily::Laplace => {
                -n * libm::log(2.0 * s) - math::sum(res.iter().map(|r| r.abs())) / s
            }
            NoiseFamily::Uniform => {
                if res.iter().all(|r| r.abs() <= s) {
                    -n * libm::log(2.0 * s)
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }
}

/// Zero-mean maximum-likelihood parameter of `family` for `res`.
pub fn mle_parameter(family: NoiseFamily, res: &[f64]) -> f64 {
    match family {
        NoiseFamily::Gaussian => libm::sqrt(math::sum(res.iter().map(|r| r * r)) / res.len() as f64),
        NoiseFamily::Laplace => math::sum(res.iter().map(|r| r.abs())) / res.len() as f64,
        NoiseFamily::Uniform => res.iter().fold(0.0f64, |m, r| m.max(r.abs())),
    }
}

/// Fit the three families and keep the one with the smallest BIC
/// (`ln n - 2 ln L`, one parameter each); ties prefer Gaussian, then Laplace.
pub fn fit_noise(res: &[f64]) -> Result<NoiseModel> {
    if res.len() < 2 {
        return Err(Error::Empty("noise fitting needs at least two residuals"));
    }
    if res.iter().any(|r| !r.is_finite()) {
        return Err(Error::invalid("residuals must be finite"));
    }
    let n = res.len();
    if res.iter().all(|&r| r == 0.0) {
        return Ok(NoiseModel { family: NoiseFamily::Gaussian, parameter: 0.0, bic: None, n_residuals: n });
    }
    let penalty = libm::log(n as f64);
    let mut scores = [0.0; 3];
    let mut params = [0.0; 3];
    for (k, family) in NoiseFamily::ALL.into_iter().enumerate() {
        params[k] = mle_parameter(family, res);
        let model = NoiseModel { family, parameter: params[k], bic: None, n_residuals: n };
        scores[k] = penalty - 2.0 * model.log_likelihood(res);
    }
    let mut best = 0;
    for k in 1..3 {
        if scores[k] < scores[best] {
            best = k;
        }
    }
    Ok(NoiseModel {
        family: NoiseFamily::ALL[best],
        parameter: params[best],
        bic: Some(BicScores { gaussian: scores[0], laplace: scores[1], uniform: scores[2] }),
        n_residuals: n,
    })
}
