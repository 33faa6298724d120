//! Hybrid least-angle regression.
//!
//! The LARS recursion decides the order in which columns enter; after each
//! entry the active set is refitted by ordinary least squares. The active
//! columns are kept in an incrementally grown QR factorisation (modified
//! Gram-Schmidt with one reorthogonalisation pass), which also gives the
//! leverages and `trace((Psi^T Psi)^-1)` needed by the corrected
//! leave-one-out error at every step in `O(N k)`.

use alloc::vec;
use alloc::vec::Vec;

use super::loo::{corrected_loo, loo_error_raw};
use crate::linalg::{axpy, dot, norm, Matrix};
use crate::{Error, Result};

/// Columns whose orthogonal complement relative to the active set falls
/// below this fraction of their norm are treated as linearly dependent.
const RANK_TOL: f64 = 1e-8;

/// One point of the path: the active set after a column entered, refitted by OLS.
#[derive(Debug, Clone, PartialEq)]
pub struct LarsStep {
    /// Column indices in order of entry.
    pub active: Vec<usize>,
    /// OLS coefficients on the original (unnormalised) columns, aligned with `active`.
    pub coefficients: Vec<f64>,
    /// Corrected leave-one-out error of this refit.
    pub loo: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LarsPath {
    pub steps: Vec<LarsStep>,
    /// The path stopped because the next column was dependent on the active set.
    pub rank_deficient: bool,
}

impl LarsPath {
    /// Step with the smallest leave-one-out error (earliest on ties).
    pub fn best(&self) -> Option<&LarsStep> {
        let mut best: Option<&LarsStep> = None;
        for s in &self.steps {
            if best.is_none_or(|b| s.loo < b.loo) {
                best = Some(s);
            }
        }
        best
    }
}

/// Run hybrid LARS on `design` (N x P) and response `y`.
///
/// The path ends when `min(N - 1, P)` columns are active, when the residual
/// vanishes, or when the next column is numerically dependent on the active
/// set. Zero columns never enter.
pub fn lars_path(design: &Matrix, y: &[f64]) -> Result<LarsPath> {
    lars_path_with(design, y, false)
}

/// [`lars_path`], optionally ending the path early once the LOO error has
/// not improved for `max(10, k_max / 10)` consecutive steps, `k_max` being
/// the longest possible path. Later steps rarely win and dominate the cost
/// on wide candidate sets.
pub fn lars_path_with(design: &Matrix, y: &[f64], early_stop: bool) -> Result<LarsPath> {
    let (n, p) = (design.rows(), design.cols());
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y.len() });
    }
    if n == 0 {
        return Err(Error::Empty("regression needs at least one observation"));
    }

    let norms: Vec<f64> = (0..p).map(|j| norm(design.column(j))).collect();
    let max_norm = norms.iter().copied().fold(0.0, f64::max);
    let usable: Vec<bool> = norms
        .iter()
        .map(|&c| c > 0.0 && c.is_finite() && c > 1e-12 * max_norm)
        .collect();
    let mut normalized = design.clone();
    for j in 0..p {
        if usable[j] {
            normalized.column_mut(j).iter_mut().for_each(|v| *v /= norms[j]);
        }
    }
    let max_active = (n - 1).min(usable.iter().filter(|&&u| u).count());
    let y_norm = norm(y);
    let stall_limit = if early_stop { (max_active / 10).max(10) } else { usize::MAX };
    let (mut best_loo, mut stalled) = (f64::INFINITY, 0usize);

    let mut path = LarsPath::default();
    let mut in_active = vec![false; p];
    let mut active: Vec<usize> = Vec::new();
    let mut q: Vec<Vec<f64>> = Vec::new();
    // columns of R^-1; column c has c + 1 entries
    let mut rinv: Vec<Vec<f64>> = Vec::new();
    let mut rinv_row_sq: Vec<f64> = Vec::new();
    let mut qty: Vec<f64> = Vec::new();
    let mut leverage = vec![0.0; n];
    let mut ols_resid = y.to_vec();
    let mut mu = vec![0.0; n];
    let mut corr = vec![0.0; p];
    let mut next: Option<usize> = None;

    while active.len() < max_active {
        let resid: Vec<f64> = y.iter().zip(&mu).map(|(a, b)| a - b).collect();
        for j in 0..p {
            corr[j] = if usable[j] { dot(normalized.column(j), &resid) } else { 0.0 };
        }
        let entering = match next.take() {
            Some(j) => j,
            None => {
                let mut best: Option<usize> = None;
                for j in (0..p).filter(|&j| usable[j] && !in_active[j]) {
                    if best.is_none_or(|b| corr[j].abs() > corr[b].abs()) {
                        best = Some(j);
                    }
                }
                match best {
                    Some(j) => j,
                    None => break,
                }
            }
        };
        if !(corr[entering].abs() > 1e-13 * y_norm) {
            break;
        }

        // orthogonalise the entering column against the active basis
        let k = active.len();
        let mut v = normalized.column(entering).to_vec();
        let mut t = vec![0.0; k];
        for _ in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let d = dot(qi, &v);
                t[i] += d;
                axpy(-d, qi, &mut v);
            }
        }
        let rho = norm(&v);
        if !(rho > RANK_TOL) {
            path.rank_deficient = true;
            break;
        }
        v.iter_mut().for_each(|x| *x /= rho);

        let mut col = vec![0.0; k + 1];
        for i in 0..k {
            let mut s = 0.0;
            for c in i..k {
                s += rinv[c][i] * t[c];
            }
            col[i] = -s / rho;
            rinv_row_sq[i] += col[i] * col[i];
        }
        col[k] = 1.0 / rho;
        rinv_row_sq.push(col[k] * col[k]);
        rinv.push(col);

        let qy = dot(&v, y);
        qty.push(qy);
        axpy(-qy, &v, &mut ols_resid);
        for (h, vi) in leverage.iter_mut().zip(&v) {
            *h += vi * vi;
        }
        q.push(v);
        active.push(entering);
        in_active[entering] = true;

        let k = active.len();
        let mut coefficients = vec![0.0; k];
        for (i, coef) in coefficients.iter_mut().enumerate() {
            let mut s = 0.0;
            for c in i..k {
                s += rinv[c][i] * qty[c];
            }
            *coef = s / norms[active[i]];
        }
        let trace: f64 = (0..k)
            .map(|i| rinv_row_sq[i] / (norms[active[i]] * norms[active[i]]))
            .sum();
        let fitted: Vec<f64> = y.iter().zip(&ols_resid).map(|(a, r)| a - r).collect();
        let raw = loo_error_raw(y, &fitted, &leverage);
        let loo = corrected_loo(raw, n, k, trace);
        path.steps.push(LarsStep { active: active.clone(), coefficients, loo });
        if loo < best_loo {
            best_loo = loo;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled >= stall_limit {
                break;
            }
        }

        if norm(&ols_resid) <= 1e-12 * y_norm || k >= max_active {
            break;
        }

        // equiangular direction: u = A * X_A G^-1 s, with G^-1 s = R^-1 R^-T s
        let signs: Vec<f64> = active.iter().map(|&j| corr[j].signum()).collect();
        let mut z = vec![0.0; k];
        for (c, zc) in z.iter_mut().enumerate() {
            *zc = (0..=c).map(|i| rinv[c][i] * signs[i]).sum();
        }
        let a_norm = 1.0 / norm(&z);
        let mut u = vec![0.0; n];
        for (c, qc) in q.iter().enumerate() {
            axpy(a_norm * z[c], qc, &mut u);
        }
        let c_max = active.iter().map(|&j| corr[j].abs()).fold(0.0, f64::max);
        let mut gamma = c_max / a_norm;
        let floor = 1e-14 * gamma;
        for j in (0..p).filter(|&j| usable[j] && !in_active[j]) {
            let aj = dot(normalized.column(j), &u);
            for (num, den) in [(c_max - corr[j], a_norm - aj), (c_max + corr[j], a_norm + aj)] {
                if den > 0.0 {
                    let g = num / den;
                    if g > floor && g < gamma {
                        gamma = g;
                        next = Some(j);
                    }
                }
            }
        }
        axpy(gamma, &u, &mut mu);
    }
    Ok(path)
}
