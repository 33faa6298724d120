//! Ensemble directories: `ensemble.json` with the seed and resampling
//! provenance, one `model_NNNN.json` per replicate, and optionally the
//! full-data model (`model.json`) and the fitted noise model (`noise.json`).

use std::path::{Path, PathBuf};

use mfpce_core::bootstrap::{BootstrapEnsemble, NoiseModel};
use mfpce_core::{ExperimentalDesign, MfModel};
use serde::{Deserialize, Serialize};

use crate::{io, Error, Result};

pub const MANIFEST: &str = "ensemble.json";
pub const BASE_MODEL: &str = "model.json";
pub const NOISE: &str = "noise.json";

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    seed: u64,
    n_b: usize,
    hf_indices: Vec<Vec<usize>>,
    lf_indices: Option<Vec<Vec<usize>>>,
    base_hf: ExperimentalDesign,
    base_lf: Option<ExperimentalDesign>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoredEnsemble {
    pub ensemble: BootstrapEnsemble,
    pub base: Option<MfModel>,
    pub noise: Option<NoiseModel>,
}

fn member_path(dir: &Path, j: usize, n_b: usize) -> PathBuf {
    let width = n_b.saturating_sub(1).to_string().len().max(4);
    dir.join(format!("model_{j:0width$}.json"))
}

pub fn exists(dir: &Path) -> bool {
    dir.join(MANIFEST).is_file()
}

/// Members first, manifest last, so a directory with a manifest is complete.
pub fn save(dir: &Path, stored: &StoredEnsemble) -> Result<()> {
    let ens = &stored.ensemble;
    let n_b = ens.n_b();
    for (j, m) in ens.models.iter().enumerate() {
        io::write_json(&member_path(dir, j, n_b), m)?;
    }
    if let Some(b) = &stored.base {
        io::write_json(&dir.join(BASE_MODEL), b)?;
    }
    if let Some(n) = &stored.noise {
        io::write_json(&dir.join(NOISE), n)?;
    }
    let manifest = Manifest {
        seed: ens.seed,
        n_b,
        hf_indices: ens.hf_indices.clone(),
        lf_indices: ens.lf_indices.clone(),
        base_hf: ens.base_hf.clone(),
        base_lf: ens.base_lf.clone(),
    };
    io::write_json(&dir.join(MANIFEST), &manifest)
}

pub fn load(dir: &Path) -> Result<StoredEnsemble> {
    let manifest: Manifest = io::read_json(&dir.join(MANIFEST))?;
    if manifest.hf_indices.len() != manifest.n_b {
        return Err(Error::Format {
            path: dir.join(MANIFEST).display().to_string(),
            message: "resample index count does not match n_b".into(),
        });
    }
    let models = (0..manifest.n_b)
        .map(|j| io::read_json::<MfModel>(&member_path(dir, j, manifest.n_b)))
        .collect::<Result<Vec<_>>>()?;
    let optional = |name: &str| -> Result<Option<PathBuf>> {
        let p = dir.join(name);
        Ok(p.is_file().then_some(p))
    };
    let base = optional(BASE_MODEL)?.map(|p| io::read_json(&p)).transpose()?;
    let noise = optional(NOISE)?.map(|p| io::read_json(&p)).transpose()?;
    Ok(StoredEnsemble {
        ensemble: BootstrapEnsemble {
            models,
            hf_indices: manifest.hf_indices,
            lf_indices: manifest.lf_indices,
            base_hf: manifest.base_hf,
            base_lf: manifest.base_lf,
            seed: manifest.seed,
        },
        base,
        noise,
    })
}
