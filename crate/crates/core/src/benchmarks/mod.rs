//! Benchmark model pairs and the experiment drivers built on them.

mod one_d;
mod study;
pub mod truss;

pub use one_d::{one_d_hf, one_d_lf};
pub use study::{
    fidelity_relation, gaussian_noise, reference_std, ConvergenceConfig, ConvergenceRow,
    ConvergenceStudy, CoverageConfig, CoverageStudy, CoverageStudyResult, ReplicationCoverage,
};
pub use truss::{beam_lf, truss_hf};

use alloc::string::ToString;
use alloc::vec;

use crate::fusion::AnalyticModel;
use crate::input::{Family, Marginal, RandomVector};
use crate::pce::PceConfig;
use crate::{Error, Result};

pub const BUILTINS: [&str; 4] = ["oneD_hf", "oneD_lf", "truss_hf", "beam_lf"];
pub const PAIRS: [&str; 2] = ["oneD", "truss"];

/// Registered analytic model by name. Evaluations outside the model's
/// domain return NaN; callers check the support beforehand.
pub fn builtin_model(name: &str) -> Result<AnalyticModel> {
    let m = match name {
        "oneD_hf" => AnalyticModel::new(name, |x| one_d_hf(x[0]).unwrap_or(f64::NAN)),
        "oneD_lf" => AnalyticModel::new(name, |x| one_d_lf(x[0]).unwrap_or(f64::NAN)),
        "truss_hf" => AnalyticModel::new(name, |x| truss_hf(x).unwrap_or(f64::NAN)),
        "beam_lf" => AnalyticModel::new(name, |x| truss::beam_lf_full(x).unwrap_or(f64::NAN)),
        _ => return Err(Error::UnknownBuiltin(name.to_string())),
    };
    Ok(m)
}

/// An HF/LF model pair on a common input model.
#[derive(Debug, Clone)]
pub struct BenchmarkPair {
    pub name: &'static str,
    pub rv: RandomVector,
    pub hf: AnalyticModel,
    pub lf: AnalyticModel,
    /// Default HF noise to inject, if the benchmark prescribes one.
    pub noise: Option<Marginal>,
    /// Standard deviation of the noise-free HF response, used to express
    /// noise levels as fractions.
    pub reference_std: f64,
    pub pce: PceConfig,
}

/// Noise fractions of the reference HF standard deviation used in the
/// one-dimensional studies.
pub const ONE_D_NOISE_FRACTIONS: [f64; 4] = [0.01, 0.05, 0.1, 0.2];

pub fn one_d_pair() -> BenchmarkPair {
    BenchmarkPair {
        name: "oneD",
        rv: RandomVector::new(vec![Marginal::uniform(0.0, 2.0).expect("valid bounds")])
            .expect("one marginal"),
        hf: builtin_model("oneD_hf").expect("registered"),
        lf: builtin_model("oneD_lf").expect("registered"),
        noise: None,
        reference_std: 0.828,
        pce: PceConfig::degrees(1, 15, 1.0),
    }
}

/// Input model of the truss: `(E1, E2, A1, A2, P1..P6)`, all independent.
pub fn truss_rv() -> RandomVector {
    let ln = |m, s| Marginal::from_moments(Family::Lognormal, m, s).expect("valid moments");
    let mut marginals = vec![ln(2.1e11, 2.1e10), ln(2.1e11, 2.1e10), ln(2e-3, 2e-4), ln(1e-3, 1e-4)];
    for _ in 0..6 {
        marginals.push(Marginal::from_moments(Family::Gumbel, 5e4, 7.5e3).expect("valid moments"));
    }
    RandomVector::new(marginals).expect("ten marginals")
}

pub fn truss_pair() -> BenchmarkPair {
    BenchmarkPair {
        name: "truss",
        rv: truss_rv(),
        hf: builtin_model("truss_hf").expect("registered"),
        lf: builtin_model("beam_lf").expect("registered"),
        noise: Some(Marginal::gaussian(0.0, 0.0015).expect("positive std")),
        reference_std: 0.0128,
        pce: PceConfig::degrees(1, 8, 0.75),
    }
}

pub fn pair(name: &str) -> Result<BenchmarkPair> {
    match name {
        "oneD" => Ok(one_d_pair()),
        "truss" => Ok(truss_pair()),
        _ => Err(Error::UnknownBuiltin(name.to_string())),
    }
}
