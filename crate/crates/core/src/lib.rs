//! Multi-fidelity surrogate modelling with sparse polynomial chaos expansions.
//!
//! A scarce, noisy high-fidelity (HF) data set is fused with a cheap
//! low-fidelity (LF) model as `rho * LF(x) + delta(x)`, where both the LF
//! surrogate and the discrepancy `delta` are sparse PCEs trained by hybrid
//! least-angle regression with degree adaptivity. Bootstrap ensembles of the
//! fused model give percentile confidence intervals for the noise-free HF
//! response and, combined with a noise model fitted to the bootstrap
//! residuals, prediction intervals for unseen noisy HF observations.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, persistence
//! and the command-line front-end live in the `mfpce` crate.

#![no_std]
// NaN-rejecting guards are written as `!(x > 0.0)` on purpose; dense kernels index explicitly.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod benchmarks;
pub mod bootstrap;
mod error;
pub mod fusion;
pub mod input;
pub mod linalg;
pub mod math;
pub mod metrics;
pub mod pce;
pub mod rng;
pub(crate) mod serde_util;

pub use error::{Error, Result};

pub use bootstrap::{
    bootstrap_ensemble, percentile_interval, BootstrapEnsemble, Interval, NoiseFamily, NoiseModel,
};
pub use fusion::{train_mf, AnalyticModel, LowFidelity, LowFidelitySource, MfConfig, MfModel};
pub use input::{lhs_sample, Family, Marginal, RandomVector};
pub use metrics::CoverageReport;
pub use pce::{train_adaptive, ExperimentalDesign, MultiIndex, PceConfig, PceModel, Truncation};
