use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Exponents of a multivariate polynomial, one per input dimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn max_exponent(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// Canonical ordering: total degree first, then exponents in
    /// decreasing lexicographic order, so `(1,0)` precedes `(0,1)`.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

/// Hyperbolic (q-norm) truncation; `q_norm = 1` is total degree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub max_degree: u32,
    pub q_norm: f64,
}

impl Truncation {
    pub fn new(max_degree: u32, q_norm: f64) -> Result<Self> {
        if !(q_norm > 0.0 && q_norm <= 1.0) {
            return Err(Error::invalid("q-norm must lie in (0, 1]"));
        }
        Ok(Truncation { max_degree, q_norm })
    }

    pub fn total_degree(max_degree: u32) -> Self {
        Truncation { max_degree, q_norm: 1.0 }
    }

    pub fn admits(&self, index: &MultiIndex) -> bool {
        let s: f64 = index.0.iter().map(|&a| qpow(a, self.q_norm)).sum();
        s <= limit(self.max_degree, self.q_norm)
    }
}

fn qpow(a: u32, q: f64) -> f64 {
    if a == 0 {
        0.0
    } else if q == 1.0 {
        a as f64
    } else {
        libm::pow(a as f64, q)
    }
}

// p^q with a relative slack for rounding on exact boundaries
fn limit(p: u32, q: f64) -> f64 {
    qpow(p, q) * (1.0 + 1e-12)
}

/// All multi-indices of dimension `dim` admitted by `scheme`, in canonical order.
pub fn enumerate_indices(dim: usize, scheme: &Truncation) -> Vec<MultiIndex> {
    let lim = limit(scheme.max_degree, scheme.q_norm);
    let mut out = Vec::new();
    let mut cur = vec![0u32; dim];
    fill(&mut cur, 0, 0.0, lim, scheme, &mut out);
    out.sort_by(MultiIndex::canonical_cmp);
    out
}

fn fill(
    cur: &mut Vec<u32>,
    pos: usize,
    partial: f64,
    lim: f64,
    scheme: &Truncation,
    out: &mut Vec<MultiIndex>,
) {
    if pos == cur.len() {
        out.push(MultiIndex(cur.clone()));
        return;
    }
    let mut a = 0u32;
    loop {
        let s = partial + qpow(a, scheme.q_norm);
        if s > lim || a > scheme.max_degree {
            break;
        }
        cur[pos] = a;
        fill(cur, pos + 1, s, lim, scheme, out);
        a += 1;
    }
    cur[pos] = 0;
}
