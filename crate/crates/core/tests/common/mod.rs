//! Independent reference computations shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

/// Error-free sum in double-double arithmetic, rounded once at the end.
pub fn dd_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut hi, mut lo) = (0.0f64, 0.0f64);
    for v in values {
        let s = hi + v;
        let bp = s - hi;
        let err = (hi - (s - bp)) + (v - bp);
        let t = s + (lo + err);
        lo = (lo + err) - (t - s);
        hi = t;
    }
    hi + lo
}

pub fn dd_mean(values: &[f64]) -> f64 {
    dd_sum(values.iter().copied()) / values.len() as f64
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues and the first component of each eigenvector.
fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<f64>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k][p], v[k][q]);
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), (0..n).map(|j| v[0][j]).collect())
}

/// Gauss rule for a symmetric measure whose orthonormal polynomials obey
/// `b(k+1) p_{k+1} = x p_k - b(k) p_{k-1}`. Eigenvalues of the Jacobi matrix
/// seed a Newton polish; weights are Christoffel numbers `1 / sum p_k(x)^2`.
fn golub_welsch(offdiag: impl Fn(usize) -> f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut j = vec![vec![0.0; n]; n];
    for k in 1..n {
        let b = offdiag(k);
        j[k - 1][k] = b;
        j[k][k - 1] = b;
    }
    let (seeds, _) = jacobi_eigen(j);
    // (p_n(x), p_n'(x), sum_{k<n} p_k(x)^2)
    let eval = |x: f64| {
        let (mut p0, mut p1, mut d0, mut d1, mut s) = (0.0, 1.0, 0.0, 0.0, 0.0);
        for k in 0..n {
            s += p1 * p1;
            let bk = if k == 0 { 0.0 } else { offdiag(k) };
            let b1 = offdiag(k + 1);
            let p2 = (x * p1 - bk * p0) / b1;
            let d2 = (p1 + x * d1 - bk * d0) / b1;
            (p0, p1, d0, d1) = (p1, p2, d1, d2);
        }
        (p1, d1, s)
    };
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for mut x in seeds {
        for _ in 0..10 {
            let (p, d, _) = eval(x);
            x -= p / d;
        }
        nodes.push(x);
        weights.push(1.0 / eval(x).2);
    }
    (nodes, weights)
}

/// Gauss rule for the uniform probability measure on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    golub_welsch(|k| k as f64 / ((4 * k * k - 1) as f64).sqrt(), n)
}

/// Gauss rule for the standard normal measure.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    golub_welsch(|k| (k as f64).sqrt(), n)
}

/// Dense Gaussian elimination with partial pivoting.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        a.swap(k, p);
        b.swap(k, p);
        assert!(a[k][k].abs() > 1e-300, "singular system");
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

/// Least squares by the normal equations.
pub fn ols(rows: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let p = rows[0].len();
    let mut g = vec![vec![0.0; p]; p];
    let mut r = vec![0.0; p];
    for (x, yi) in rows.iter().zip(y) {
        for i in 0..p {
            r[i] += x[i] * yi;
            for j in 0..p {
                g[i][j] += x[i] * x[j];
            }
        }
    }
    solve_dense(g, r)
}

/// Mean squared leave-one-out residual by explicit refits.
pub fn brute_force_loo(rows: &[Vec<f64>], y: &[f64]) -> f64 {
    let n = y.len();
    let mut acc = 0.0;
    for i in 0..n {
        let (r, t): (Vec<Vec<f64>>, Vec<f64>) =
            rows.iter().zip(y).enumerate().filter(|(k, _)| *k != i).map(|(_, (x, y))| (x.clone(), *y)).unzip();
        let c = ols(&r, &t);
        let pred: f64 = rows[i].iter().zip(&c).map(|(a, b)| a * b).sum();
        acc += (y[i] - pred) * (y[i] - pred);
    }
    acc / n as f64
}

/// Mid-span deflection of the 23-bar truss by the unit-load method. Member
/// forces come from joint equilibrium (the truss is statically
/// determinate), once for the real loads and once for a unit load at the
/// mid-span node: `w = sum N n L / (E A)`.
pub fn truss_unit_load(x: &[f64]) -> f64 {
    let (e1, e2, a1, a2) = (x[0], x[1], x[2], x[3]);
    let node = |i: usize| -> (f64, f64) { if i < 7 { (4.0 * i as f64, 0.0) } else { (2.0 + 4.0 * (i - 7) as f64, 2.0) } };
    let mut bars = Vec::new();
    for i in 0..6 {
        bars.push((i, i + 1, true));
    }
    for k in 0..5 {
        bars.push((7 + k, 8 + k, true));
    }
    for k in 0..6 {
        bars.push((k, 7 + k, false));
        bars.push((k + 1, 7 + k, false));
    }
    // unknowns: 23 bar tensions, then reactions Rx0, Ry0, Ry6
    let build = || {
        let mut a = vec![vec![0.0; 26]; 26];
        for (b, &(i, j, _)) in bars.iter().enumerate() {
            let ((xi, yi), (xj, yj)) = (node(i), node(j));
            let l = ((xj - xi).powi(2) + (yj - yi).powi(2)).sqrt();
            let (cx, cy) = ((xj - xi) / l, (yj - yi) / l);
            a[2 * i][b] += cx;
            a[2 * i + 1][b] += cy;
            a[2 * j][b] -= cx;
            a[2 * j + 1][b] -= cy;
        }
        a[0][23] = 1.0;
        a[1][24] = 1.0;
        a[13][25] = 1.0;
        a
    };
    let mut f = vec![0.0; 26];
    for k in 0..6 {
        f[2 * (7 + k) + 1] = x[4 + k];
    }
    let forces = solve_dense(build(), f);
    let mut unit = vec![0.0; 26];
    unit[7] = 1.0;
    let virt = solve_dense(build(), unit);
    bars.iter()
        .enumerate()
        .map(|(b, &(i, j, chord))| {
            let ((xi, yi), (xj, yj)) = (node(i), node(j));
            let l = ((xj - xi).powi(2) + (yj - yi).powi(2)).sqrt();
            let ea = if chord { e1 * a1 } else { e2 * a2 };
            forces[b] * virt[b] * l / ea
        })
        .sum()
}
