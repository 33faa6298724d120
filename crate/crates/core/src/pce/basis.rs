use alloc::vec;
use alloc::vec::Vec;

use super::MultiIndex;
use crate::input::{RandomVector, StandardSpace};
use crate::{Error, Result};

/// Orthonormal Legendre polynomials on `[-1, 1]` (weight 1/2), degrees `0..out.len()`.
pub fn legendre_orthonormal(u: f64, out: &mut [f64]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    // raw P_k by Bonnet's recurrence, scaled by sqrt(2k + 1) afterwards
    let mut prev = 1.0;
    out[0] = 1.0;
    if n > 1 {
        let mut cur = u;
        out[1] = libm::sqrt(3.0) * cur;
        for k in 1..n - 1 {
            let kf = k as f64;
            let next = ((2.0 * kf + 1.0) * u * cur - kf * prev) / (kf + 1.0);
            prev = cur;
            cur = next;
            out[k + 1] = libm::sqrt(2.0 * kf + 3.0) * cur;
        }
    }
}

/// Orthonormal probabilists' Hermite polynomials `He_k / sqrt(k!)`.
pub fn hermite_orthonormal(z: f64, out: &mut [f64]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    out[0] = 1.0;
    if n > 1 {
        out[1] = z;
        for k in 1..n - 1 {
            let kf = k as f64;
            out[k + 1] = (z * out[k] - libm::sqrt(kf) * out[k - 1]) / libm::sqrt(kf + 1.0);
        }
    }
}

/// Univariate basis values at one point, for every dimension and every
/// degree up to `max_degree`.
#[derive(Debug, Clone)]
pub struct BasisTable {
    stride: usize,
    values: Vec<f64>,
}

impl BasisTable {
    pub fn new(rv: &RandomVector, x: &[f64], max_degree: u32) -> Result<Self> {
        let z = rv.to_standard(x)?;
        Ok(Self::from_standard(rv, &z, max_degree))
    }

    pub fn from_standard(rv: &RandomVector, z: &[f64], max_degree: u32) -> Self {
        let stride = max_degree as usize + 1;
        let mut values = vec![0.0; stride * rv.dim()];
        for (d, (m, &zd)) in rv.marginals().iter().zip(z).enumerate() {
            let slot = &mut values[d * stride..(d + 1) * stride];
            match m.standard_space() {
                StandardSpace::Uniform => legendre_orthonormal(zd, slot),
                StandardSpace::Normal => hermite_orthonormal(zd, slot),
            }
        }
        BasisTable { stride, values }
    }

    pub fn max_degree(&self) -> u32 {
        (self.stride - 1) as u32
    }

    #[inline]
    pub fn get(&self, dim: usize, degree: u32) -> f64 {
        self.values[dim * self.stride + degree as usize]
    }

    /// Multivariate basis function `Psi_alpha` at this point.
    #[inline]
    pub fn eval(&self, index: &MultiIndex) -> f64 {
        let mut p = 1.0;
        for (d, &a) in index.0.iter().enumerate() {
            if a != 0 {
                p *= self.values[d * self.stride + a as usize];
            }
        }
        p
    }
}

/// Value of the orthonormal basis function `index` at physical point `x`.
pub fn eval_basis(rv: &RandomVector, index: &MultiIndex, x: &[f64]) -> Result<f64> {
    if index.dim() != rv.dim() {
        return Err(Error::DimensionMismatch { expected: rv.dim(), got: index.dim() });
    }
    Ok(BasisTable::new(rv, x, index.max_exponent())?.eval(index))
}
