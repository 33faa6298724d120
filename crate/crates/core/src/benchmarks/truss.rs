//! 23-bar plane truss (HF) and simply supported beam (LF).
//!
//! Lower chord nodes sit at `x = 0, 4, ..., 24`, upper chord nodes at
//! `x = 2, 6, ..., 22` and `y = H`. Chords use `(E1, A1)`, the twelve
//! diagonals `(E2, A2)`. The truss is pinned at the left end, on a roller at
//! the right end and loaded downward at the six upper nodes.

use alloc::vec::Vec;

use crate::linalg::{cholesky_solve, Matrix};
use crate::{Error, Result};

pub const SPAN: f64 = 24.0;
pub const HEIGHT: f64 = 2.0;
pub const N_LOWER: usize = 7;
pub const N_UPPER: usize = 6;
pub const N_NODES: usize = N_LOWER + N_UPPER;
/// Lower chord node at mid-span.
pub const MID_NODE: usize = 3;

/// Bar properties group: chords or diagonals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BarGroup {
    Chord,
    Diagonal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bar {
    pub start: usize,
    pub end: usize,
    pub group: BarGroup,
}

/// Truss inputs in the benchmark's variable order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrussState {
    pub e1: f64,
    pub e2: f64,
    pub a1: f64,
    pub a2: f64,
    pub loads: [f64; 6],
}

impl TrussState {
    /// From `(E1, E2, A1, A2, P1..P6)`.
    pub fn from_slice(x: &[f64]) -> Result<Self> {
        if x.len() != 10 {
            return Err(Error::DimensionMismatch { expected: 10, got: x.len() });
        }
        let mut loads = [0.0; 6];
        loads.copy_from_slice(&x[4..]);
        Ok(TrussState { e1: x[0], e2: x[1], a1: x[2], a2: x[3], loads })
    }

    pub fn stiffness(&self, group: BarGroup) -> f64 {
        match group {
            BarGroup::Chord => self.e1 * self.a1,
            BarGroup::Diagonal => self.e2 * self.a2,
        }
    }
}

pub fn node(i: usize) -> (f64, f64) {
    if i < N_LOWER {
        (4.0 * i as f64, 0.0)
    } else {
        (2.0 + 4.0 * (i - N_LOWER) as f64, HEIGHT)
    }
}

pub fn bars() -> Vec<Bar> {
    let mut b = Vec::with_capacity(23);
    for i in 0..N_LOWER - 1 {
        b.push(Bar { start: i, end: i + 1, group: BarGroup::Chord });
    }
    for k in 0..N_UPPER - 1 {
        b.push(Bar { start: N_LOWER + k, end: N_LOWER + k + 1, group: BarGroup::Chord });
    }
    for k in 0..N_UPPER {
        b.push(Bar { start: k, end: N_LOWER + k, group: BarGroup::Diagonal });
        b.push(Bar { start: k + 1, end: N_LOWER + k, group: BarGroup::Diagonal });
    }
    b
}

/// Constrained DOFs: both at the pin, vertical at the roller.
const FIXED: [usize; 3] = [0, 1, 2 * (N_LOWER - 1) + 1];

fn free_map() -> [Option<usize>; 2 * N_NODES] {
    let mut map = [None; 2 * N_NODES];
    let mut k = 0;
    for (d, slot) in map.iter_mut().enumerate() {
        if !FIXED.contains(&d) {
            *slot = Some(k);
            k += 1;
        }
    }
    map
}

/// Downward mid-span deflection by the direct stiffness method.
pub fn truss_hf(x: &[f64]) -> Result<f64> {
    let s = TrussState::from_slice(x)?;
    if !(s.e1 > 0.0 && s.e2 > 0.0 && s.a1 > 0.0 && s.a2 > 0.0) {
        return Err(Error::invalid("truss stiffness parameters must be positive"));
    }
    let map = free_map();
    let nf = 2 * N_NODES - FIXED.len();
    let mut k = Matrix::zeros(nf, nf);
    for bar in bars() {
        let (x1, y1) = node(bar.start);
        let (x2, y2) = node(bar.end);
        let len = libm::hypot(x2 - x1, y2 - y1);
        let (c, sn) = ((x2 - x1) / len, (y2 - y1) / len);
        let ea_l = s.stiffness(bar.group) / len;
        let dir = [-c, -sn, c, sn];
        let dofs = [2 * bar.start, 2 * bar.start + 1, 2 * bar.end, 2 * bar.end + 1];
        for a in 0..4 {
            let Some(ia) = map[dofs[a]] else { continue };
            for b in 0..4 {
                if let Some(ib) = map[dofs[b]] {
                    k[(ia, ib)] += ea_l * dir[a] * dir[b];
                }
            }
        }
    }
    let mut f = alloc::vec![0.0; nf];
    for (j, p) in s.loads.iter().enumerate() {
        if let Some(i) = map[2 * (N_LOWER + j) + 1] {
            f[i] = -p;
        }
    }
    let u = cholesky_solve(&k, &f).map_err(|_| Error::Singular("truss stiffness matrix"))?;
    let mid = map[2 * MID_NODE + 1].expect("mid-span vertical DOF is free");
    Ok(-u[mid])
}

/// Simply supported beam of span `L`, second moment `2 A1 (H/2)^2`, under the
/// total load spread uniformly: `5 L^3 sum(P) / (384 E1 I)`.
pub fn beam_lf(e1: f64, a1: f64, loads: &[f64]) -> Result<f64> {
    if !(e1 > 0.0 && a1 > 0.0) {
        return Err(Error::invalid("beam stiffness parameters must be positive"));
    }
    let total: f64 = loads.iter().sum();
    let inertia = 2.0 * a1 * (HEIGHT / 2.0) * (HEIGHT / 2.0);
    Ok(5.0 * SPAN * SPAN * SPAN * total / (384.0 * e1 * inertia))
}

/// [`beam_lf`] on the full truss input vector (`E2`, `A2` unused).
pub fn beam_lf_full(x: &[f64]) -> Result<f64> {
    let s = TrussState::from_slice(x)?;
    beam_lf(s.e1, s.a1, &s.loads)
}
