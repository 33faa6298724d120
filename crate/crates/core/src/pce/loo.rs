//! Leave-one-out error of least-squares fits via the hat-matrix identity.

use crate::linalg::{Matrix, Qr};
use crate::math;

/// Leave-one-out error `(1/N) sum_i ((y_i - yhat_i) / (1 - h_i))^2 / Var(y)`.
///
/// `Var(y)` uses the `N - 1` divisor; a constant response is not normalised.
/// Returns `+inf` when some leverage reaches one.
pub fn loo_error_raw(y: &[f64], fitted: &[f64], leverage: &[f64]) -> f64 {
    let n = y.len();
    let mut acc = 0.0;
    for i in 0..n {
        let denom = 1.0 - leverage[i];
        if !(denom > 1e-12) {
            return f64::INFINITY;
        }
        let r = (y[i] - fitted[i]) / denom;
        acc += r * r;
    }
    acc / n as f64 / response_scale(y)
}

pub(crate) fn response_scale(y: &[f64]) -> f64 {
    let v = if y.len() > 1 { math::variance(y, 1) } else { 0.0 };
    if v > 0.0 && v.is_finite() {
        v
    } else {
        1.0
    }
}

/// Small-sample correction `N / (N - k) * (1 + trace((Psi^T Psi)^-1))`; `+inf` when `N <= k`.
pub fn correction_factor(n: usize, k: usize, trace_inv_gram: f64) -> f64 {
    if n <= k {
        f64::INFINITY
    } else {
        n as f64 / (n - k) as f64 * (1.0 + trace_inv_gram)
    }
}

pub fn corrected_loo(raw: f64, n: usize, k: usize, trace_inv_gram: f64) -> f64 {
    if n <= k || !raw.is_finite() {
        return f64::INFINITY;
    }
    raw * correction_factor(n, k, trace_inv_gram)
}

/// Corrected leave-one-out error of the fit `design * coefficients` to `y`.
///
/// Rank-deficient or interpolating designs give `+inf`.
pub fn loo_error(design: &Matrix, y: &[f64], coefficients: &[f64]) -> f64 {
    let (n, k) = (design.rows(), design.cols());
    if n <= k {
        return f64::INFINITY;
    }
    let Ok(qr) = Qr::new(design) else {
        return f64::INFINITY;
    };
    let fitted = design.mul_vec(coefficients);
    let raw = loo_error_raw(y, &fitted, &qr.hat_diagonal());
    corrected_loo(raw, n, k, qr.trace_inverse_gram())
}
