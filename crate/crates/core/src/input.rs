//! Probabilistic input model: independent marginals, the isoprobabilistic
//! map to standard space, and Latin hypercube sampling.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::math::{self, EULER_GAMMA};
use crate::rng;
use crate::{Error, Result};

/// Distribution family of a marginal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Uniform,
    Gaussian,
    Lognormal,
    Gumbel,
}

/// Standard variable a marginal is mapped to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StandardSpace {
    /// Uniform on `[-1, 1]`; Legendre basis.
    Uniform,
    /// Standard normal; Hermite basis.
    Normal,
}

/// A univariate input distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Marginal {
    Uniform { lower: f64, upper: f64 },
    Gaussian { mean: f64, std: f64 },
    /// `ln X ~ N(lambda, zeta^2)`.
    Lognormal { lambda: f64, zeta: f64 },
    /// Gumbel (maximum) with location and scale.
    Gumbel { location: f64, scale: f64 },
}

impl Marginal {
    pub fn uniform(lower: f64, upper: f64) -> Result<Self> {
        Marginal::Uniform { lower, upper }.validated()
    }

    pub fn gaussian(mean: f64, std: f64) -> Result<Self> {
        Marginal::Gaussian { mean, std }.validated()
    }

    pub fn lognormal(lambda: f64, zeta: f64) -> Result<Self> {
        Marginal::Lognormal { lambda, zeta }.validated()
    }

    pub fn gumbel(location: f64, scale: f64) -> Result<Self> {
        Marginal::Gumbel { location, scale }.validated()
    }

    /// Moment-matched marginal with the given mean and standard deviation.
    pub fn from_moments(family: Family, mean: f64, std: f64) -> Result<Self> {
        if !(std > 0.0) || !std.is_finite() {
            return Err(Error::invalid("standard deviation must be positive"));
        }
        if !mean.is_finite() {
            return Err(Error::invalid("mean must be finite"));
        }
        match family {
            Family::Gaussian => Marginal::gaussian(mean, std),
            Family::Lognormal => {
                if !(mean > 0.0) {
                    return Err(Error::invalid("lognormal mean must be positive"));
                }
                let cv = std / mean;
                let zeta2 = libm::log1p(cv * cv);
                Marginal::lognormal(libm::log(mean) - 0.5 * zeta2, libm::sqrt(zeta2))
            }
            Family::Gumbel => {
                let scale = std * libm::sqrt(6.0) / PI;
                Marginal::gumbel(mean - EULER_GAMMA * scale, scale)
            }
            Family::Uniform => Err(Error::invalid(
                "uniform marginals are specified by bounds, not moments",
            )),
        }
    }

    pub fn validated(self) -> Result<Self> {
        let ok = match self {
            Marginal::Uniform { lower, upper } => {
                lower.is_finite() && upper.is_finite() && upper > lower
            }
            Marginal::Gaussian { mean, std } => mean.is_finite() && std.is_finite() && std > 0.0,
            Marginal::Lognormal { lambda, zeta } => {
                lambda.is_finite() && zeta.is_finite() && zeta > 0.0
            }
            Marginal::Gumbel { location, scale } => {
                location.is_finite() && scale.is_finite() && scale > 0.0
            }
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::invalid("marginal parameters out of range"))
        }
    }

    pub fn family(&self) -> Family {
        match self {
            Marginal::Uniform { .. } => Family::Uniform,
            Marginal::Gaussian { .. } => Family::Gaussian,
            Marginal::Lognormal { .. } => Family::Lognormal,
            Marginal::Gumbel { .. } => Family::Gumbel,
        }
    }

    pub fn standard_space(&self) -> StandardSpace {
        match self {
            Marginal::Uniform { .. } => StandardSpace::Uniform,
            _ => StandardSpace::Normal,
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Marginal::Uniform { lower, upper } => 0.5 * (lower + upper),
            Marginal::Gaussian { mean, .. } => mean,
            Marginal::Lognormal { lambda, zeta } => libm::exp(lambda + 0.5 * zeta * zeta),
            Marginal::Gumbel { location, scale } => location + EULER_GAMMA * scale,
        }
    }

    pub fn std(&self) -> f64 {
        match *self {
            Marginal::Uniform { lower, upper } => (upper - lower) / libm::sqrt(12.0),
            Marginal::Gaussian { std, .. } => std,
            Marginal::Lognormal { lambda, zeta } => {
                libm::sqrt(libm::expm1(zeta * zeta)) * libm::exp(lambda + 0.5 * zeta * zeta)
            }
            Marginal::Gumbel { scale, .. } => scale * PI / libm::sqrt(6.0),
        }
    }

    pub fn in_support(&self, x: f64) -> bool {
        match *self {
            Marginal::Uniform { lower, upper } => x >= lower && x <= upper,
            Marginal::Lognormal { .. } => x > 0.0 && x.is_finite(),
            _ => x.is_finite(),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Marginal::Uniform { lower, upper } => ((x - lower) / (upper - lower)).clamp(0.0, 1.0),
            Marginal::Gaussian { mean, std } => math::norm_cdf((x - mean) / std),
            Marginal::Lognormal { lambda, zeta } => {
                if x <= 0.0 {
                    0.0
                } else {
                    math::norm_cdf((libm::log(x) - lambda) / zeta)
                }
            }
            Marginal::Gumbel { location, scale } => {
                libm::exp(-libm::exp(-(x - location) / scale))
            }
        }
    }

    pub fn quantile(&self, p: f64) -> f64 {
        match *self {
            Marginal::Uniform { lower, upper } => lower + p * (upper - lower),
            Marginal::Gaussian { mean, std } => mean + std * math::norm_ppf(p),
            Marginal::Lognormal { lambda, zeta } => libm::exp(lambda + zeta * math::norm_ppf(p)),
            Marginal::Gumbel { location, scale } => location - scale * libm::log(-libm::log(p)),
        }
    }

    /// Map a physical value to the standard variable of this marginal.
    pub fn to_standard(&self, x: f64) -> Option<f64> {
        if !self.in_support(x) {
            return None;
        }
        Some(match *self {
            Marginal::Uniform { lower, upper } => 2.0 * (x - lower) / (upper - lower) - 1.0,
            Marginal::Gaussian { mean, std } => (x - mean) / std,
            Marginal::Lognormal { lambda, zeta } => (libm::log(x) - lambda) / zeta,
            Marginal::Gumbel { location, scale } => {
                let t = libm::exp(-(x - location) / scale);
                let cdf = libm::exp(-t);
                if cdf <= 0.5 {
                    math::norm_ppf(cdf)
                } else {
                    // 1 - exp(-t), without cancellation
                    math::norm_isf(-libm::expm1(-t))
                }
            }
        })
    }

    /// Inverse of [`Marginal::to_standard`].
    pub fn from_standard(&self, z: f64) -> f64 {
        match *self {
            Marginal::Uniform { lower, upper } => lower + 0.5 * (z + 1.0) * (upper - lower),
            Marginal::Gaussian { mean, std } => mean + std * z,
            Marginal::Lognormal { lambda, zeta } => libm::exp(lambda + zeta * z),
            Marginal::Gumbel { location, scale } => {
                // -ln(Phi(z)) computed from whichever tail is small
                let neg_log_cdf = if z <= 0.0 {
                    -libm::log(math::norm_cdf(z))
                } else {
                    -libm::log1p(-math::norm_sf(z))
                };
                location - scale * libm::log(neg_log_cdf)
            }
        }
    }
}

/// Independent marginals of an input random vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRandomVector")]
pub struct RandomVector {
    marginals: Vec<Marginal>,
}

#[derive(Deserialize)]
struct RawRandomVector {
    marginals: Vec<Marginal>,
}

impl TryFrom<RawRandomVector> for RandomVector {
    type Error = Error;
    fn try_from(raw: RawRandomVector) -> Result<Self> {
        RandomVector::new(raw.marginals)
    }
}

impl RandomVector {
    pub fn new(marginals: Vec<Marginal>) -> Result<Self> {
        if marginals.is_empty() {
            return Err(Error::Empty("random vector needs at least one marginal"));
        }
        let marginals = marginals
            .into_iter()
            .map(Marginal::validated)
            .collect::<Result<Vec<_>>>()?;
        Ok(RandomVector { marginals })
    }

    pub fn dim(&self) -> usize {
        self.marginals.len()
    }

    pub fn marginals(&self) -> &[Marginal] {
        &self.marginals
    }

    pub fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(())
    }

    pub fn to_standard_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_dim(x)?;
        for (i, (m, &xi)) in self.marginals.iter().zip(x).enumerate() {
            out[i] = m
                .to_standard(xi)
                .ok_or(Error::OutsideSupport { index: i, value: xi })?;
        }
        Ok(())
    }

    pub fn to_standard(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = alloc::vec![0.0; self.dim()];
        self.to_standard_into(x, &mut out)?;
        Ok(out)
    }

    pub fn from_standard(&self, z: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(z)?;
        Ok(self.marginals.iter().zip(z).map(|(m, &zi)| m.from_standard(zi)).collect())
    }

    pub fn lhs_sample(&self, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        lhs_sample(self, n, seed)
    }
}

/// Latin hypercube sample of size `n`.
///
/// Each coordinate is split into `n` equiprobable strata; a random
/// permutation assigns strata to samples and the point is placed uniformly
/// at random inside its stratum, then mapped through the marginal quantile.
pub fn lhs_sample(rv: &RandomVector, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::Empty("LHS sample size must be at least 1"));
    }
    let mut rng = rng::stream(seed, rng::domain::LHS, 0);
    let mut out = alloc::vec![alloc::vec![0.0; rv.dim()]; n];
    let mut perm: Vec<usize> = (0..n).collect();
    for (d, m) in rv.marginals().iter().enumerate() {
        perm.shuffle(&mut rng);
        for (i, row) in out.iter_mut().enumerate() {
            let u: f64 = rng.random();
            let p = (perm[i] as f64 + u) / n as f64;
            // open interval guard for the unbounded families
            let p = p.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
            row[d] = m.quantile(p);
        }
    }
    Ok(out)
}
