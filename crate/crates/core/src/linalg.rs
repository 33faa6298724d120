//! Small dense linear algebra used by the regression and structural code.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Dense column-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    /// Build from row slices.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Matrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(Error::DimensionMismatch { expected: c, got: row.len() });
            }
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    pub fn from_columns(rows: usize, columns: Vec<Vec<f64>>) -> Result<Self> {
        let cols = columns.len();
        let mut data = Vec::with_capacity(rows * cols);
        for c in columns {
            if c.len() != rows {
                return Err(Error::DimensionMismatch { expected: rows, got: c.len() });
            }
            data.extend(c);
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn column_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// Columns `idx` as a new matrix.
    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for &j in idx {
            data.extend_from_slice(self.column(j));
        }
        Matrix { rows: self.rows, cols: idx.len(), data }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        for (j, &vj) in v.iter().enumerate().take(self.cols) {
            axpy(vj, self.column(j), &mut out);
        }
        out
    }
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[j * self.rows + i]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[j * self.rows + i]
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Solve `A x = b` for symmetric positive definite `A` by Cholesky.
pub fn cholesky_solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.rows();
    if a.cols() != n || b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.len() });
    }
    let mut l = Matrix::zeros(n, n);
    let scale = (0..n).map(|i| a[(i, i)].abs()).fold(0.0, f64::max);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 1e-14 * scale) {
            return Err(Error::Singular("matrix is not positive definite"));
        }
        let d = libm::sqrt(d);
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[(i, k)] * y[k];
        }
        y[i] /= l[(i, i)];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= l[(k, i)] * y[k];
        }
        y[i] /= l[(i, i)];
    }
    Ok(y)
}

/// Thin QR factorisation by Householder reflections.
pub struct Qr {
    /// Householder vectors below the diagonal, R on and above it.
    qr: Matrix,
    tau: Vec<f64>,
}

impl Qr {
    pub fn new(a: &Matrix) -> Result<Self> {
        let (m, n) = (a.rows(), a.cols());
        if n > m {
            return Err(Error::Singular("more columns than rows"));
        }
        let mut qr = a.clone();
        let mut tau = vec![0.0; n];
        for k in 0..n {
            let alpha = norm(&qr.column(k)[k..]);
            if alpha == 0.0 {
                return Err(Error::Singular("rank-deficient design"));
            }
            let x0 = qr[(k, k)];
            let beta = if x0 >= 0.0 { -alpha } else { alpha };
            let v0 = x0 - beta;
            {
                let col = qr.column_mut(k);
                for v in &mut col[k + 1..] {
                    *v /= v0;
                }
                col[k] = beta;
            }
            tau[k] = (beta - x0) / beta;
            for j in k + 1..n {
                let mut s = qr[(k, j)];
                for i in k + 1..m {
                    s += qr[(i, k)] * qr[(i, j)];
                }
                s *= tau[k];
                qr[(k, j)] -= s;
                for i in k + 1..m {
                    let h = qr[(i, k)];
                    qr[(i, j)] -= s * h;
                }
            }
        }
        let scale = (0..n).map(|i| qr[(i, i)].abs()).fold(0.0, f64::max);
        if (0..n).any(|i| qr[(i, i)].abs() <= 1e-13 * scale) {
            return Err(Error::Singular("rank-deficient design"));
        }
        Ok(Qr { qr, tau })
    }

    fn apply_qt(&self, b: &mut [f64]) {
        let m = self.qr.rows();
        for k in 0..self.qr.cols() {
            let mut s = b[k];
            for i in k + 1..m {
                s += self.qr[(i, k)] * b[i];
            }
            s *= self.tau[k];
            b[k] -= s;
            for i in k + 1..m {
                b[i] -= s * self.qr[(i, k)];
            }
        }
    }

    fn apply_q(&self, b: &mut [f64]) {
        let m = self.qr.rows();
        for k in (0..self.qr.cols()).rev() {
            let mut s = b[k];
            for i in k + 1..m {
                s += self.qr[(i, k)] * b[i];
            }
            s *= self.tau[k];
            b[k] -= s;
            for i in k + 1..m {
                b[i] -= s * self.qr[(i, k)];
            }
        }
    }

    /// Least-squares solution of `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.qr.cols();
        let mut y = b.to_vec();
        self.apply_qt(&mut y);
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                s -= self.qr[(i, j)] * x[j];
            }
            x[i] = s / self.qr[(i, i)];
        }
        x
    }

    /// Diagonal of the hat matrix `A (A^T A)^-1 A^T`.
    pub fn hat_diagonal(&self) -> Vec<f64> {
        let (m, n) = (self.qr.rows(), self.qr.cols());
        let mut h = vec![0.0; m];
        let mut e = vec![0.0; m];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            self.apply_q(&mut e);
            for (hi, qi) in h.iter_mut().zip(&e) {
                *hi += qi * qi;
            }
        }
        h
    }

    /// `trace((A^T A)^-1) = ||R^-1||_F^2`.
    pub fn trace_inverse_gram(&self) -> f64 {
        let n = self.qr.cols();
        let mut total = 0.0;
        // columns of R^-1 by back substitution on unit vectors
        let mut x = vec![0.0; n];
        for c in 0..n {
            for i in (0..n).rev() {
                let mut s = if i == c { 1.0 } else { 0.0 };
                for j in i + 1..n {
                    s -= self.qr[(i, j)] * x[j];
                }
                x[i] = s / self.qr[(i, i)];
            }
            total += x.iter().map(|v| v * v).sum::<f64>();
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_small_system() {
        let a = Matrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 3.0]]).unwrap();
        let x = cholesky_solve(&a, &[2.0, 1.0]).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-15 && x[1].abs() < 1e-15);
        let s = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(cholesky_solve(&s, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn qr_least_squares_and_hat() {
        // fit y = 1 + 2 t on 4 points
        let rows: Vec<Vec<f64>> = (0..4).map(|t| vec![1.0, t as f64]).collect();
        let a = Matrix::from_rows(&rows).unwrap();
        let y: Vec<f64> = (0..4).map(|t| 1.0 + 2.0 * t as f64).collect();
        let qr = Qr::new(&a).unwrap();
        let x = qr.solve(&y);
        assert!((x[0] - 1.0).abs() < 1e-13 && (x[1] - 2.0).abs() < 1e-13);
        let h = qr.hat_diagonal();
        // leverages of t = 0..3 with intercept: 1/n + (t - 1.5)^2 / 5
        for (t, hi) in h.iter().enumerate() {
            let expect = 0.25 + (t as f64 - 1.5).powi(2) / 5.0;
            assert!((hi - expect).abs() < 1e-13);
        }
        // (A^T A)^-1 = [[7/10, -3/10], [-3/10, 1/5]]
        assert!((qr.trace_inverse_gram() - 0.9).abs() < 1e-13);
    }

    #[test]
    fn qr_rejects_rank_deficiency() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0], vec![3.0, 6.0]]).unwrap();
        assert!(Qr::new(&a).is_err());
    }
}
