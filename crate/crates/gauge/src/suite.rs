//! Writes the 23-encoder synthetic suite in the ingest formats.
//!
//! Layout under the output directory:
//!
//! ```text
//! manifest.json   catalog.json   domains.npy   actions.npy
//! embeddings/synth-01.npy … embeddings/synth-23.npy
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use sim2real_gauge_core::synth::generate_suite;
use sim2real_gauge_core::EncoderMeta;

use crate::catalog::catalog_json;
use crate::manifest::{DatasetManifest, EncoderEntry};
use crate::npy::{write_npy, NpyError};

pub const IMAGE_HEIGHT: u32 = 240;
pub const IMAGE_WIDTH: u32 = 320;
pub const CHANNELS: u32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Npy(#[from] NpyError),
    #[error(transparent)]
    Core(#[from] sim2real_gauge_core::Error),
}

fn write_text(path: PathBuf, text: &str) -> Result<(), SuiteError> {
    fs::write(&path, text).map_err(|source| SuiteError::Io { path, source })
}

/// Generates the suite for `seed` and writes it to `dir`, returning the
/// manifest path. Output bytes depend only on `seed`.
pub fn write_suite(dir: &Path, seed: u64) -> Result<PathBuf, SuiteError> {
    let suite = generate_suite(seed)?;
    let embed_dir = dir.join("embeddings");
    fs::create_dir_all(&embed_dir).map_err(|source| SuiteError::Io { path: embed_dir.clone(), source })?;

    write_npy(&suite.domains.to_matrix(), dir.join("domains.npy"))?;
    write_npy(&suite.actions, dir.join("actions.npy"))?;

    let mut encoders = Vec::with_capacity(suite.members.len());
    let mut metas: Vec<EncoderMeta> = Vec::with_capacity(suite.members.len());
    for (member, embeddings) in &suite.members {
        let rel = format!("embeddings/{}.npy", member.encoder_id());
        write_npy(embeddings, dir.join(&rel))?;
        encoders.push(EncoderEntry {
            encoder_id: member.encoder_id().to_owned(),
            embeddings_path: rel,
            declared_dim: embeddings.cols(),
        });
        metas.push(member.meta.clone());
    }

    write_text(dir.join("catalog.json"), &catalog_json(&metas))?;
    let manifest = DatasetManifest {
        dataset_name: format!("synthetic-suite-seed-{seed}"),
        image_height: IMAGE_HEIGHT,
        image_width: IMAGE_WIDTH,
        channels: CHANNELS,
        domains_path: "domains.npy".into(),
        actions_path: "actions.npy".into(),
        encoders,
        base_dir: dir.to_owned(),
    };
    let path = dir.join("manifest.json");
    write_text(path.clone(), &manifest.to_json())?;
    Ok(path)
}
