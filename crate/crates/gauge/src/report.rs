//! Evaluation reports and their JSON and CSV renderings.
//!
//! Both renderings are byte-stable: JSON keys are sorted and every float is
//! printed with six decimals (values too small to survive that are printed
//! in exponent form instead of collapsing to zero).

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sim2real_gauge_core::{AsResult, Catalog, DisResult, EncoderMeta, ProbeConfig};

use crate::manifest::DatasetManifest;

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// How actions were scaled before the probe's MSE was taken.
pub const ACTION_NORMALIZATION: &str = "per-dimension z-score with train-split statistics";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub pca_dim_requested: usize,
    /// d* after clamping to min(rows, embedding dim).
    pub pca_dim_effective: usize,
    pub epsilon: f64,
    /// Probe settings as used, seed already mixed with the encoder id.
    pub probe: ProbeConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderResult {
    pub encoder_id: String,
    pub dis: DisResult,
    #[serde(rename = "as")]
    pub as_result: AsResult,
    pub meta: Option<EncoderMeta>,
    pub config: ConfigEcho,
    pub warnings: Vec<String>,
}

impl EncoderResult {
    pub fn combined_score(&self) -> f64 {
        self.dis.dis + self.as_result.action_score
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderFailure {
    pub encoder_id: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageShape {
    pub height: u32,
    pub width: u32,
    pub channels: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub dataset_name: String,
    pub created_at: String,
    pub engine_version: String,
    pub image: ImageShape,
    pub action_normalization: String,
    pub results: Vec<EncoderResult>,
    pub failures: Vec<EncoderFailure>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ReportError {
    #[error("report needs at least one successful encoder result")]
    NoResults,
    #[error("duplicate encoder id {0:?} in report")]
    DuplicateEncoder(String),
    #[error("canvas must be positive, got {width}x{height}")]
    BadCanvas { width: f64, height: f64 },
}

/// Assembles a report, attaching catalog metadata where results lack it.
///
/// Results are ordered by descending DIS + AS, ties by encoder id.
pub fn build_report(
    mut results: Vec<EncoderResult>,
    failures: Vec<EncoderFailure>,
    manifest: &DatasetManifest,
    catalog: &Catalog,
    created_at: String,
) -> Result<EvaluationReport, ReportError> {
    if results.is_empty() {
        return Err(ReportError::NoResults);
    }
    let mut seen = HashSet::new();
    for id in results.iter().map(|r| &r.encoder_id).chain(failures.iter().map(|f| &f.encoder_id)) {
        if !seen.insert(id.clone()) {
            return Err(ReportError::DuplicateEncoder(id.clone()));
        }
    }
    for r in &mut results {
        if r.meta.is_none() {
            r.meta = catalog.lookup(&r.encoder_id).cloned();
        }
    }
    results.sort_by(|a, b| {
        b.combined_score()
            .total_cmp(&a.combined_score())
            .then_with(|| a.encoder_id.cmp(&b.encoder_id))
    });
    let mut failures = failures;
    failures.sort_by(|a, b| a.encoder_id.cmp(&b.encoder_id));
    Ok(EvaluationReport {
        dataset_name: manifest.dataset_name.clone(),
        created_at,
        engine_version: ENGINE_VERSION.to_owned(),
        image: ImageShape {
            height: manifest.image_height,
            width: manifest.image_width,
            channels: manifest.channels,
        },
        action_normalization: ACTION_NORMALIZATION.to_owned(),
        results,
        failures,
    })
}

/// Six-decimal float text; nonzero values that would print as zero use
/// exponent form.
pub fn format_float(x: f64) -> String {
    let fixed = format!("{x:.6}");
    if x != 0.0 && fixed.trim_start_matches('-').bytes().all(|b| b == b'0' || b == b'.') {
        format!("{x:e}")
    } else {
        fixed
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) if !n.is_f64() => write!(out, "{u}").unwrap(),
            (_, Some(i), _) if !n.is_f64() => write!(out, "{i}").unwrap(),
            (_, _, Some(f)) => out.push_str(&format_float(f)),
            _ => unreachable!("JSON numbers are u64, i64 or f64"),
        },
        Value::String(s) => out.push_str(&serde_json::to_string(s).unwrap()),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&"  ".repeat(indent + 1));
                write_value(out, item, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(indent));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, key) in keys.iter().enumerate() {
                out.push_str(&"  ".repeat(indent + 1));
                out.push_str(&serde_json::to_string(key).unwrap());
                out.push_str(": ");
                write_value(out, &map[*key], indent + 1);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(indent));
            out.push('}');
        }
    }
}

/// Canonical JSON text of any JSON value.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

pub fn emit_json(r: &EvaluationReport) -> String {
    canonical_json(&serde_json::to_value(r).expect("report serializes"))
}

pub const CSV_COLUMNS: [&str; 9] = [
    "encoder_id",
    "dis",
    "raw_gap",
    "action_score",
    "val_mse",
    "architecture",
    "pretraining",
    "parameters_millions",
    "embedding_dim",
];

/// One row per result in report order. Metadata cells are empty for
/// encoders outside the catalog.
pub fn emit_csv(r: &EvaluationReport) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).expect("in-memory write");
    for res in &r.results {
        let meta = res.meta.as_ref();
        w.write_record([
            res.encoder_id.clone(),
            format_float(res.dis.dis),
            format_float(res.dis.raw_gap),
            format_float(res.as_result.action_score),
            format_float(res.as_result.val_mse),
            meta.map(|m| m.architecture.token().to_owned()).unwrap_or_default(),
            meta.map(|m| m.pretraining.token().to_owned()).unwrap_or_default(),
            meta.map(|m| format_float(m.parameters_millions)).unwrap_or_default(),
            meta.map(|m| m.embedding_dim.to_string()).unwrap_or_default(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV of UTF-8 fields")
}
