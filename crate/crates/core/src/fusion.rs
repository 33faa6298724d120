//! Two-fidelity fusion `psi_H(x) = rho * LF(x) + delta(x)`.
//!
//! The LF information is first turned into something evaluable everywhere
//! (an analytic model is used as is, LF data are surrogated by a sparse PCE),
//! the scaling `rho` is estimated from the HF observations, and the
//! discrepancy `delta` is learnt as a PCE on the HF residuals. When both the
//! LF model and `delta` are PCEs on the same input model, they are merged
//! into a single expansion.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::input::RandomVector;
use crate::metrics;
use crate::pce::{train_adaptive, BasisTable, ExperimentalDesign, MultiIndex, PceConfig, PceModel};
use crate::rng;
use crate::{Error, Result};

type ModelFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A named closed-form model evaluated in physical space.
#[derive(Clone)]
pub struct AnalyticModel {
    name: String,
    f: ModelFn,
}

impl AnalyticModel {
    pub fn new(name: impl Into<String>, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        AnalyticModel { name: name.into(), f: Arc::new(f) }
    }

    /// One of the registered benchmark models.
    pub fn builtin(name: &str) -> Result<Self> {
        crate::benchmarks::builtin_model(name)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

impl fmt::Debug for AnalyticModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("AnalyticModel").field(&self.name).finish()
    }
}

impl PartialEq for AnalyticModel {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

/// Where the low-fidelity information comes from.
#[derive(Debug, Clone)]
pub enum LowFidelitySource {
    /// Cheap closed-form model, used directly.
    Analytic(AnalyticModel),
    /// Model to be sampled on an LHS design of size `n` and surrogated.
    Sampled { model: AnalyticModel, n: usize },
    /// LF data to be surrogated.
    Design(ExperimentalDesign),
    /// A pre-trained LF surrogate.
    Surrogate(PceModel),
}

/// An LF model ready for evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum LowFidelity {
    Analytic(AnalyticModel),
    Pce(PceModel),
}

impl LowFidelity {
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        match self {
            LowFidelity::Analytic(m) => Ok(m.eval(x)),
            LowFidelity::Pce(p) => p.predict(x),
        }
    }

    pub fn as_pce(&self) -> Option<&PceModel> {
        match self {
            LowFidelity::Pce(p) => Some(p),
            LowFidelity::Analytic(_) => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
enum LowFidelityRepr {
    #[serde(rename = "builtin")]
    Builtin(String),
    #[serde(rename = "pce")]
    Pce(PceModel),
}

impl Serialize for LowFidelity {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        match self {
            LowFidelity::Analytic(m) => LowFidelityRepr::Builtin(m.name.clone()).serialize(s),
            LowFidelity::Pce(p) => LowFidelityRepr::Pce(p.clone()).serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for LowFidelity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        match LowFidelityRepr::deserialize(d)? {
            LowFidelityRepr::Builtin(name) => AnalyticModel::builtin(&name)
                .map(LowFidelity::Analytic)
                .map_err(serde::de::Error::custom),
            LowFidelityRepr::Pce(p) => Ok(LowFidelity::Pce(p)),
        }
    }
}

/// LF model plus the design it was trained on, if any.
#[derive(Debug, Clone)]
pub struct PreparedLowFidelity {
    pub model: LowFidelity,
    pub design: Option<ExperimentalDesign>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoMethod {
    /// Mean of pointwise ratios `y_H / LF(x_H)`.
    MeanRatio,
    /// Ratio of PCE standard deviations `sigma_H / sigma_L`.
    StdRatio,
}

/// Agreement between HF observations and the LF model at the HF inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityDiagnostic {
    pub pearson: f64,
    pub nrmse: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MfConfig {
    pub lf: PceConfig,
    pub delta: PceConfig,
    /// Fall back to the standard-deviation ratio when the ratio guard trips.
    pub rho_fallback: bool,
    /// Merge LF and discrepancy expansions when both are PCEs.
    pub merge: bool,
}

impl Default for MfConfig {
    fn default() -> Self {
        MfConfig {
            lf: PceConfig::default(),
            delta: PceConfig::default(),
            rho_fallback: false,
            merge: true,
        }
    }
}

impl MfConfig {
    pub fn with_pce(pce: PceConfig) -> Self {
        MfConfig { lf: pce, delta: pce, ..Self::default() }
    }
}

/// The multi-fidelity predictor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MfModel {
    pub lf: LowFidelity,
    pub rho: f64,
    pub rho_method: RhoMethod,
    pub delta: PceModel,
    pub merged: Option<PceModel>,
    pub diagnostic: Option<FidelityDiagnostic>,
}

impl MfModel {
    /// Model predicting the constant `value`; used when a fit degenerates.
    pub fn constant(lf: LowFidelity, rv: RandomVector, value: f64) -> Self {
        let delta = PceModel::constant(rv, value, f64::INFINITY);
        let merged = matches!(lf, LowFidelity::Pce(_)).then(|| delta.clone());
        MfModel { lf, rho: 0.0, rho_method: RhoMethod::MeanRatio, delta, merged, diagnostic: None }
    }

    pub fn rv(&self) -> &RandomVector {
        self.delta.rv()
    }

    /// `rho * LF(x) + delta(x)`, through the merged expansion when present.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        match &self.merged {
            Some(m) => m.predict(x),
            None => self.predict_composite(x),
        }
    }

    /// Always evaluates the two parts separately.
    pub fn predict_composite(&self, x: &[f64]) -> Result<f64> {
        let d = self.delta.predict(x)?;
        Ok(self.rho * self.lf.eval(x)? + d)
    }

    /// Highest univariate degree needed by [`Self::predict_table`].
    pub fn max_exponent(&self) -> u32 {
        match (&self.merged, &self.lf) {
            (Some(m), _) => m.max_exponent(),
            (None, LowFidelity::Pce(p)) => p.max_exponent().max(self.delta.max_exponent()),
            (None, LowFidelity::Analytic(_)) => self.delta.max_exponent(),
        }
    }

    /// Evaluate on a precomputed basis table; `analytic_lf` must carry the
    /// LF value at the same point when the LF model is analytic.
    pub fn predict_table(&self, table: &BasisTable, analytic_lf: Option<f64>) -> f64 {
        if let Some(m) = &self.merged {
            return m.predict_table(table);
        }
        let lf = match &self.lf {
            LowFidelity::Pce(p) => p.predict_table(table),
            LowFidelity::Analytic(_) => analytic_lf.unwrap_or(f64::NAN),
        };
        self.rho * lf + self.delta.predict_table(table)
    }
}

/// Turn an LF source into an evaluable model.
///
/// Analytic models and pre-trained surrogates pass through; LF data (given,
/// or sampled by LHS from a model with a budget) are surrogated by a
/// degree-adaptive sparse PCE.
pub fn prepare_lf(
    source: &LowFidelitySource,
    rv: &RandomVector,
    config: &PceConfig,
    seed: u64,
) -> Result<PreparedLowFidelity> {
    match source {
        LowFidelitySource::Analytic(m) => {
            Ok(PreparedLowFidelity { model: LowFidelity::Analytic(m.clone()), design: None })
        }
        LowFidelitySource::Surrogate(p) => {
            Ok(PreparedLowFidelity { model: LowFidelity::Pce(p.clone()), design: None })
        }
        LowFidelitySource::Sampled { model, n } => {
            let ed = sample_lf_design(model, rv, *n, seed)?;
            let pce = train_adaptive(&ed, rv, config)?;
            Ok(PreparedLowFidelity { model: LowFidelity::Pce(pce), design: Some(ed) })
        }
        LowFidelitySource::Design(ed) => {
            if ed.is_empty() {
                return Err(Error::Empty("LF experimental design is empty"));
            }
            let pce = train_adaptive(ed, rv, config)?;
            Ok(PreparedLowFidelity { model: LowFidelity::Pce(pce), design: Some(ed.clone()) })
        }
    }
}

/// LHS design of size `n` evaluated on `model`, as used for a sampling budget.
pub fn sample_lf_design(
    model: &AnalyticModel,
    rv: &RandomVector,
    n: usize,
    seed: u64,
) -> Result<ExperimentalDesign> {
    if n == 0 {
        return Err(Error::Empty("LF sampling budget is zero"));
    }
    let inputs = rv.lhs_sample(n, rng::derive_seed(seed, rng::domain::LF_DESIGN, 0))?;
    ExperimentalDesign::from_model(inputs, |x| model.eval(x))
}

/// Ratio guard: LF values at or below `1e-8 * max|LF|` are refused.
pub fn rho_guard_threshold(lf_at_xh: &[f64]) -> f64 {
    1e-8 * lf_at_xh.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// `rho = mean_i y_H_i / LF(x_H_i)`.
pub fn estimate_rho(y_h: &[f64], lf_at_xh: &[f64]) -> Result<f64> {
    if y_h.len() != lf_at_xh.len() {
        return Err(Error::DimensionMismatch { expected: y_h.len(), got: lf_at_xh.len() });
    }
    if y_h.is_empty() {
        return Err(Error::Empty("no HF observations"));
    }
    let threshold = rho_guard_threshold(lf_at_xh);
    if let Some((index, &value)) = lf_at_xh.iter().enumerate().find(|(_, v)| !(v.abs() > threshold))
    {
        return Err(Error::RhoGuard { index, value, threshold });
    }
    Ok(crate::math::sum(y_h.iter().zip(lf_at_xh).map(|(y, l)| y / l)) / y_h.len() as f64)
}

/// `rho = sigma_H / sigma_L`. Sensitive to noise in the HF data; use only
/// when little noise is expected.
pub fn estimate_rho_alt(sigma_h: f64, sigma_l: f64) -> Result<f64> {
    if !(sigma_l > 0.0) || !sigma_l.is_finite() || !(sigma_h >= 0.0) {
        return Err(Error::invalid("standard deviations must be positive"));
    }
    Ok(sigma_h / sigma_l)
}

/// Discrepancy data `(x_H, y_H - rho * LF(x_H))`.
pub fn build_discrepancy_ed(
    hf_ed: &ExperimentalDesign,
    lf: &LowFidelity,
    rho: f64,
) -> Result<ExperimentalDesign> {
    let outputs = hf_ed
        .inputs
        .iter()
        .zip(&hf_ed.outputs)
        .map(|(x, y)| Ok(y - rho * lf.eval(x)?))
        .collect::<Result<Vec<_>>>()?;
    ExperimentalDesign::new(hf_ed.inputs.clone(), outputs)
}

/// Single expansion equal to `rho * lf + delta`.
pub fn merge_expansions(rho: f64, lf: &PceModel, delta: &PceModel) -> Result<PceModel> {
    if lf.rv() != delta.rv() {
        return Err(Error::Incompatible("LF and discrepancy PCEs use different input models"));
    }
    let mut terms: Vec<(MultiIndex, f64)> = lf
        .indices()
        .iter()
        .cloned()
        .zip(lf.coefficients().iter().map(|c| rho * c))
        .collect();
    for (a, c) in delta.indices().iter().zip(delta.coefficients()) {
        match terms.iter_mut().find(|t| &t.0 == a) {
            Some(t) => t.1 += c,
            None => terms.push((a.clone(), *c)),
        }
    }
    terms.sort_by(|a, b| a.0.canonical_cmp(&b.0));
    let (indices, coefficients) = terms.into_iter().unzip();
    PceModel::new(
        delta.rv().clone(),
        indices,
        coefficients,
        delta.loo_error(),
        lf.degree_used().max(delta.degree_used()),
    )
}

/// Train the multi-fidelity model from HF data and an LF source.
pub fn train_mf(
    hf_ed: &ExperimentalDesign,
    source: &LowFidelitySource,
    rv: &RandomVector,
    config: &MfConfig,
    seed: u64,
) -> Result<MfModel> {
    if hf_ed.is_empty() {
        return Err(Error::Empty("HF experimental design is empty"));
    }
    let prepared = prepare_lf(source, rv, &config.lf, seed)?;
    train_mf_prepared(hf_ed, prepared.model, rv, config)
}

/// Steps after the LF model is available: scaling, discrepancy, merging.
pub fn train_mf_prepared(
    hf_ed: &ExperimentalDesign,
    lf: LowFidelity,
    rv: &RandomVector,
    config: &MfConfig,
) -> Result<MfModel> {
    if hf_ed.is_empty() {
        return Err(Error::Empty("HF experimental design is empty"));
    }
    let lf_at_xh = hf_ed.inputs.iter().map(|x| lf.eval(x)).collect::<Result<Vec<_>>>()?;
    let (rho, rho_method) = match estimate_rho(&hf_ed.outputs, &lf_at_xh) {
        Ok(r) => (r, RhoMethod::MeanRatio),
        Err(Error::RhoGuard { .. }) if config.rho_fallback => {
            let sigma_h = train_adaptive(hf_ed, rv, &config.delta)?.std();
            let sigma_l = match &lf {
                LowFidelity::Pce(p) => p.std(),
                LowFidelity::Analytic(_) => {
                    let ed = ExperimentalDesign::new(hf_ed.inputs.clone(), lf_at_xh.clone())?;
                    train_adaptive(&ed, rv, &config.lf)?.std()
                }
            };
            (estimate_rho_alt(sigma_h, sigma_l)?, RhoMethod::StdRatio)
        }
        Err(e) => return Err(e),
    };

    let outputs: Vec<f64> = hf_ed.outputs.iter().zip(&lf_at_xh).map(|(y, l)| y - rho * l).collect();
    let delta_ed = ExperimentalDesign::new(hf_ed.inputs.clone(), outputs)?;
    let delta = train_adaptive(&delta_ed, rv, &config.delta)?;

    let merged = match &lf {
        LowFidelity::Pce(p) if config.merge && p.rv() == rv => {
            Some(merge_expansions(rho, p, &delta)?)
        }
        _ => None,
    };
    let diagnostic = metrics::pearson_nrmse(&hf_ed.outputs, &lf_at_xh)
        .ok()
        .map(|(pearson, nrmse)| FidelityDiagnostic { pearson, nrmse });
    Ok(MfModel { lf, rho, rho_method, delta, merged, diagnostic })
}

impl fmt::Display for MfModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lf = match &self.lf {
            LowFidelity::Analytic(m) => m.name().to_string(),
            LowFidelity::Pce(p) => alloc::format!("PCE(degree {}, {} terms)", p.degree_used(), p.len()),
        };
        write!(
            f,
            "rho = {} ({:?}), LF = {}, delta: degree {}, {} terms, LOO {:e}",
            self.rho,
            self.rho_method,
            lf,
            self.delta.degree_used(),
            self.delta.len(),
            self.delta.loo_error()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::input::Marginal;
    use alloc::vec;

    fn rv() -> RandomVector {
        RandomVector::new(vec![Marginal::uniform(0.0, 2.0).unwrap()]).unwrap()
    }

    #[test]
    fn rho_examples() {
        assert_eq!(estimate_rho(&[2.0, 4.0], &[1.0, 2.0]).unwrap(), 2.0);
        let lf = [0.3, -1.2, 2.5];
        let y: Vec<f64> = lf.iter().map(|v| 2.0 * v).collect();
        assert_eq!(estimate_rho(&y, &lf).unwrap(), 2.0);
        assert!(matches!(estimate_rho(&[1.0, 1.0], &[1.0, 0.0]), Err(Error::RhoGuard { index: 1, .. })));
        assert!(matches!(estimate_rho(&[1.0], &[0.0]), Err(Error::RhoGuard { .. })));
    }

    #[test]
    fn rho_alt_examples() {
        assert_eq!(estimate_rho_alt(1.0, 1.0).unwrap(), 1.0);
        assert_eq!(estimate_rho_alt(2.0, 4.0).unwrap(), 0.5);
        assert!((estimate_rho_alt(0.828, 0.707).unwrap() - 1.171).abs() < 1e-3);
        assert!(estimate_rho_alt(1.0, 0.0).is_err());
    }

    #[test]
    fn discrepancy_outputs() {
        let lf = LowFidelity::Analytic(AnalyticModel::new("sq", |x| x[0] * x[0] + 1.0));
        let inputs = vec![vec![0.5], vec![1.0], vec![1.5]];
        let exact = ExperimentalDesign::from_model(inputs.clone(), |x| 3.0 * (x[0] * x[0] + 1.0)).unwrap();
        assert!(build_discrepancy_ed(&exact, &lf, 3.0).unwrap().outputs.iter().all(|&v| v == 0.0));
        let shifted =
            ExperimentalDesign::from_model(inputs, |x| 3.0 * (x[0] * x[0] + 1.0) + 1.0).unwrap();
        let d = build_discrepancy_ed(&shifted, &lf, 3.0).unwrap();
        assert!(d.outputs.iter().all(|&v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn merge_disjoint_and_shared_terms() {
        let rv = rv();
        let a = PceModel::new(rv.clone(), vec![MultiIndex(vec![0]), MultiIndex(vec![2])], vec![1.0, 2.0], 0.0, 2).unwrap();
        let b = PceModel::new(rv.clone(), vec![MultiIndex(vec![1])], vec![5.0], 0.0, 1).unwrap();
        let m = merge_expansions(1.0, &a, &b).unwrap();
        assert_eq!(m.indices(), &[MultiIndex(vec![0]), MultiIndex(vec![1]), MultiIndex(vec![2])]);
        assert_eq!(m.coefficients(), &[1.0, 5.0, 2.0]);
        let m = merge_expansions(0.5, &a, &a).unwrap();
        assert_eq!(m.coefficients(), &[1.5, 3.0]);
        let other = RandomVector::new(vec![Marginal::uniform(0.0, 1.0).unwrap()]).unwrap();
        let c = PceModel::constant(other, 1.0, 0.0);
        assert!(merge_expansions(1.0, &a, &c).is_err());
    }

    #[test]
    fn analytic_pass_through() {
        let m = AnalyticModel::new("sin", |x| libm::sin(x[0]));
        let p = prepare_lf(&LowFidelitySource::Analytic(m.clone()), &rv(), &PceConfig::default(), 1)
            .unwrap();
        assert_eq!(p.model, LowFidelity::Analytic(m));
        assert!(p.design.is_none());
        let empty = LowFidelitySource::Sampled { model: AnalyticModel::new("z", |_| 0.0), n: 0 };
        assert!(prepare_lf(&empty, &rv(), &PceConfig::default(), 1).is_err());
    }

    #[test]
    fn scaled_analytic_lf_is_recovered() {
        let rv = rv();
        let lf = AnalyticModel::new("shifted", |x| x[0] + 0.5);
        let inputs = rv.lhs_sample(20, 9).unwrap();
        let hf = ExperimentalDesign::from_model(inputs, |x| 3.0 * (x[0] + 0.5)).unwrap();
        let m = train_mf(&hf, &LowFidelitySource::Analytic(lf), &rv, &MfConfig::default(), 0).unwrap();
        assert!((m.rho - 3.0).abs() < 1e-12);
        assert!(m.delta.variance() < 1e-12);
        assert!(m.merged.is_none());
    }

    #[test]
    fn guard_without_fallback_propagates() {
        let rv = rv();
        let lf = AnalyticModel::new("zero-at-one", |x| x[0] - 1.0);
        let hf = ExperimentalDesign::new(vec![vec![0.5], vec![1.0], vec![1.5]], vec![1.0, 2.0, 3.0]).unwrap();
        let src = LowFidelitySource::Analytic(lf);
        assert!(matches!(train_mf(&hf, &src, &rv, &MfConfig::default(), 0), Err(Error::RhoGuard { .. })));
        let cfg = MfConfig { rho_fallback: true, ..MfConfig::default() };
        let m = train_mf(&hf, &src, &rv, &cfg, 0).unwrap();
        assert_eq!(m.rho_method, RhoMethod::StdRatio);
    }
}
