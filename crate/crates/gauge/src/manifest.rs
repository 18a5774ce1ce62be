//! Dataset manifest (JSON) and per-encoder dataset loading.
//!
//! ```json
//! {
//!   "dataset_name": "bench",
//!   "image_height": 240, "image_width": 320, "channels": 3,
//!   "domains_path": "domains.npy",
//!   "actions_path": "actions.npy",
//!   "encoders": [{"encoder_id": "MCR", "embeddings_path": "mcr.npy", "declared_dim": 2048}]
//! }
//! ```
//!
//! Relative paths resolve against the manifest's directory.

use std::collections::HashSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sim2real_gauge_core::{DomainLabels, EncoderDataset};

use crate::npy::{read_npy, NpyError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderEntry {
    pub encoder_id: String,
    pub embeddings_path: String,
    pub declared_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub dataset_name: String,
    pub image_height: u32,
    pub image_width: u32,
    pub channels: u32,
    pub domains_path: String,
    pub actions_path: String,
    pub encoders: Vec<EncoderEntry>,
    /// Directory that relative paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("duplicate encoder id {0:?}")]
    DuplicateId(String),
    #[error("encoder {0:?}: declared_dim must be at least 1")]
    NonPositiveDim(String),
    #[error("{0} must not be empty")]
    EmptyField(String),
    #[error("encoder not in manifest: {0:?}")]
    UnknownEncoder(String),
    #[error("{what}: {source}")]
    Npy { what: &'static str, source: NpyError },
    #[error("encoder {encoder_id:?}: {source}")]
    Dataset {
        encoder_id: String,
        source: sim2real_gauge_core::Error,
    },
}

impl DatasetManifest {
    /// Checks ids, dimensions and paths.
    pub fn validate(&self) -> Result<(), ManifestError> {
        let empty = |field: String| Err(ManifestError::EmptyField(field));
        if self.domains_path.trim().is_empty() {
            return empty("domains_path".into());
        }
        if self.actions_path.trim().is_empty() {
            return empty("actions_path".into());
        }
        if self.encoders.is_empty() {
            return empty("encoders".into());
        }
        let mut seen = HashSet::new();
        for e in &self.encoders {
            if e.encoder_id.trim().is_empty() {
                return empty("encoder_id".into());
            }
            if !seen.insert(e.encoder_id.as_str()) {
                return Err(ManifestError::DuplicateId(e.encoder_id.clone()));
            }
            if e.declared_dim == 0 {
                return Err(ManifestError::NonPositiveDim(e.encoder_id.clone()));
            }
            if e.embeddings_path.trim().is_empty() {
                return empty(format!("embeddings_path of {:?}", e.encoder_id));
            }
        }
        Ok(())
    }

    pub fn encoder(&self, encoder_id: &str) -> Result<&EncoderEntry, ManifestError> {
        self.encoders
            .iter()
            .find(|e| e.encoder_id == encoder_id)
            .ok_or_else(|| ManifestError::UnknownEncoder(encoder_id.to_owned()))
    }

    pub fn resolve(&self, path: &str) -> PathBuf {
        self.base_dir.join(path)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }
}

/// Reads and validates a manifest file.
pub fn read_manifest(path: impl AsRef<Path>) -> Result<DatasetManifest, ManifestError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ManifestError::Io { path: path.to_owned(), source })?;
    let mut manifest: DatasetManifest =
        serde_json::from_str(&text).map_err(|source| ManifestError::Parse { path: path.to_owned(), source })?;
    manifest.base_dir = path.parent().map(Path::to_owned).unwrap_or_default();
    manifest.validate()?;
    Ok(manifest)
}

/// Loads the embeddings, domain flags and actions of one encoder.
pub fn load_dataset(manifest: &DatasetManifest, encoder_id: &str) -> Result<EncoderDataset, ManifestError> {
    let entry = manifest.encoder(encoder_id)?;
    let npy = |what, path: &str| read_npy(manifest.resolve(path)).map_err(|source| ManifestError::Npy { what, source });
    let wrap = |source| ManifestError::Dataset {
        encoder_id: encoder_id.to_owned(),
        source,
    };

    let embeddings = npy("embeddings", &entry.embeddings_path)?;
    if embeddings.cols() != entry.declared_dim {
        return Err(wrap(sim2real_gauge_core::Error::DimMismatch {
            encoder_id: encoder_id.to_owned(),
            expected: entry.declared_dim,
            actual: embeddings.cols(),
        }));
    }
    let domains = DomainLabels::from_matrix(&npy("domains", &manifest.domains_path)?).map_err(wrap)?;
    let actions = npy("actions", &manifest.actions_path)?;
    EncoderDataset::new(encoder_id, embeddings, domains, actions).map_err(wrap)
}
