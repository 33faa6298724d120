//! `builtin:<name>`, `csv:<path>` and `model:<path>` LF specifications.

use std::path::PathBuf;
use std::str::FromStr;

use mfpce_core::{AnalyticModel, LowFidelitySource, PceModel};

use crate::{io, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum LfSpec {
    Builtin(String),
    Csv(PathBuf),
    Model(PathBuf),
}

impl FromStr for LfSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.split_once(':') {
            Some(("builtin", name)) => Ok(LfSpec::Builtin(name.to_string())),
            Some(("csv", p)) => Ok(LfSpec::Csv(p.into())),
            Some(("model", p)) => Ok(LfSpec::Model(p.into())),
            _ => Err(format!("expected builtin:<name>, csv:<path> or model:<path>, got `{s}`")),
        }
    }
}

impl LfSpec {
    /// Resolve to a source. A builtin with a budget `n_lf > 0` is sampled
    /// and surrogated; without one it is used analytically.
    pub fn resolve(&self, n_lf: usize) -> Result<LowFidelitySource> {
        Ok(match self {
            LfSpec::Builtin(name) => {
                let model = AnalyticModel::builtin(name).map_err(|e| Error::Usage(e.to_string()))?;
                if n_lf > 0 {
                    LowFidelitySource::Sampled { model, n: n_lf }
                } else {
                    LowFidelitySource::Analytic(model)
                }
            }
            LfSpec::Csv(p) => LowFidelitySource::Design(io::read_design(p)?),
            LfSpec::Model(p) => LowFidelitySource::Surrogate(io::read_json::<PceModel>(p)?),
        })
    }
}
