//! Encoder catalog files: a JSON array of entries shaped like the built-in
//! catalog. Entries override built-ins with the same id and extend the rest.

use std::fs;
use std::path::{Path, PathBuf};

use sim2real_gauge_core::{Catalog, EncoderMeta};

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("{}: {source}", path.display())]
    Invalid {
        path: PathBuf,
        source: sim2real_gauge_core::Error,
    },
}

pub fn read_catalog_entries(path: impl AsRef<Path>) -> Result<Vec<EncoderMeta>, CatalogError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| CatalogError::Io { path: path.to_owned(), source })?;
    serde_json::from_str(&text).map_err(|source| CatalogError::Parse { path: path.to_owned(), source })
}

/// Built-in catalog, extended by `overrides` when given.
pub fn load_catalog(overrides: Option<&Path>) -> Result<Catalog, CatalogError> {
    let Some(path) = overrides else {
        return Ok(Catalog::builtin());
    };
    let entries = read_catalog_entries(path)?;
    Catalog::builtin()
        .with_overrides(entries)
        .map_err(|source| CatalogError::Invalid { path: path.to_owned(), source })
}

pub fn catalog_json(entries: &[EncoderMeta]) -> String {
    serde_json::to_string_pretty(entries).expect("catalog serializes") + "\n"
}
