//! Polynomial chaos expansions: truncation sets, orthonormal bases, hybrid
//! LARS with leave-one-out model selection, and degree-adaptive training.

mod basis;
mod index;
mod lars;
mod loo;
mod model;
mod train;

pub use basis::{eval_basis, hermite_orthonormal, legendre_orthonormal, BasisTable};
pub use index::{enumerate_indices, MultiIndex, Truncation};
pub use lars::{lars_path, lars_path_with, LarsPath, LarsStep};
pub use loo::{corrected_loo, correction_factor, loo_error, loo_error_raw};
pub use model::PceModel;
pub use train::{design_matrix, train_adaptive, ExperimentalDesign, PceConfig};
