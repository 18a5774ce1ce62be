//! Manifest-level evaluation: per-encoder scoring on a bounded thread pool,
//! report assembly and output files.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sim2real_gauge_core::{evaluate, Catalog, DimCheck, EvalConfig};

use crate::manifest::{load_dataset, DatasetManifest, ManifestError};
use crate::report::{emit_csv, emit_json, ConfigEcho, EncoderFailure, EncoderResult, EvaluationReport};
use crate::svg::emit_scatter_svg;

pub const SVG_WIDTH: f64 = 960.0;
pub const SVG_HEIGHT: f64 = 720.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl Format {
    pub fn file_name(self) -> &'static str {
        match self {
            Format::Json => "report.json",
            Format::Csv => "report.csv",
            Format::Svg => "scatter.svg",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EncoderError {
    #[error(transparent)]
    Load(#[from] ManifestError),
    #[error(transparent)]
    Metric(#[from] sim2real_gauge_core::Error),
}

/// Loads and scores one encoder.
pub fn evaluate_encoder(
    manifest: &DatasetManifest,
    encoder_id: &str,
    catalog: &Catalog,
    cfg: &EvalConfig,
) -> Result<EncoderResult, EncoderError> {
    let ds = load_dataset(manifest, encoder_id)?;
    let mut warnings = Vec::new();
    if catalog.check_dataset(&ds)? == DimCheck::NotInCatalog {
        warnings.push(format!("{encoder_id} is not in the encoder catalog; dimension check skipped"));
    }
    let eval = evaluate(&ds, cfg)?;
    if eval.effective_pca.target_dim < cfg.pca.target_dim {
        warnings.push(format!(
            "PCA dimension clamped from {} to {} (min of rows and embedding width)",
            cfg.pca.target_dim, eval.effective_pca.target_dim
        ));
    }
    Ok(EncoderResult {
        encoder_id: encoder_id.to_owned(),
        dis: eval.dis,
        as_result: eval.as_result,
        meta: catalog.lookup(encoder_id).cloned(),
        config: ConfigEcho {
            pca_dim_requested: cfg.pca.target_dim,
            pca_dim_effective: eval.effective_pca.target_dim,
            epsilon: eval.effective_pca.epsilon,
            probe: eval.probe,
        },
        warnings,
    })
}

/// Scores every encoder of the manifest using at most `jobs` threads.
/// Output order follows the manifest regardless of `jobs`.
pub fn evaluate_manifest(
    manifest: &DatasetManifest,
    catalog: &Catalog,
    cfg: &EvalConfig,
    jobs: usize,
) -> Result<(Vec<EncoderResult>, Vec<EncoderFailure>), rayon::ThreadPoolBuildError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    let outcomes: Vec<_> = pool.install(|| {
        manifest
            .encoders
            .par_iter()
            .map(|e| (e.encoder_id.clone(), evaluate_encoder(manifest, &e.encoder_id, catalog, cfg)))
            .collect()
    });
    let mut results = Vec::new();
    let mut failures = Vec::new();
    for (encoder_id, outcome) in outcomes {
        match outcome {
            Ok(r) => results.push(r),
            Err(e) => failures.push(EncoderFailure {
                encoder_id,
                error: e.to_string(),
            }),
        }
    }
    Ok((results, failures))
}

/// Report timestamp: `SOURCE_DATE_EPOCH` when set, otherwise the manifest's
/// modification time, so reruns on unchanged inputs give identical bytes.
pub fn created_at(manifest_path: &Path) -> String {
    let secs = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.trim().parse::<i64>().ok())
        .or_else(|| {
            let modified = fs::metadata(manifest_path).and_then(|m| m.modified()).ok()?;
            let since = modified.duration_since(std::time::UNIX_EPOCH).ok()?;
            i64::try_from(since.as_secs()).ok()
        })
        .unwrap_or(0);
    chrono::DateTime::from_timestamp(secs, 0)
        .unwrap_or_default()
        .format("%Y-%m-%dT%H:%M:%SZ")
        .to_string()
}

/// Writes the requested renderings into `dir` and returns their paths.
pub fn write_outputs(report: &EvaluationReport, dir: &Path, formats: &[Format]) -> anyhow::Result<Vec<PathBuf>> {
    use anyhow::Context;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut formats = formats.to_vec();
    formats.sort();
    formats.dedup();
    let mut written = Vec::with_capacity(formats.len());
    for f in formats {
        let body = match f {
            Format::Json => emit_json(report),
            Format::Csv => emit_csv(report),
            Format::Svg => emit_scatter_svg(report, SVG_WIDTH, SVG_HEIGHT)?,
        };
        let path = dir.join(f.file_name());
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
    }
    Ok(written)
}
