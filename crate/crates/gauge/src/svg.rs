//! DIS–AS scatter plot as SVG 1.1.
//!
//! x = DIS, y = AS, both on [0, 1]. Marker area grows with parameter count
//! (radius linear in √params, 4–16 px), fill encodes architecture, and shape
//! encodes pre-training data: circles for manipulation, squares for general.
//! Encoders without metadata are drawn as neutral gray circles.

use std::fmt::Write as _;

use sim2real_gauge_core::registry::{Architecture, Pretraining};

use crate::report::{EncoderResult, EvaluationReport, ReportError};

pub const MARGIN_FRACTION: f64 = 0.1;
pub const MIN_RADIUS: f64 = 4.0;
pub const MAX_RADIUS: f64 = 16.0;
/// Radius used when every marker has the same size or size is unknown.
pub const DEFAULT_RADIUS: f64 = 10.0;

pub const CNN_COLOR: &str = "#1f77b4";
pub const TRANSFORMER_COLOR: &str = "#ff7f0e";
pub const NEUTRAL_COLOR: &str = "#999999";

/// Affine map from score space to pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axes {
    pub width: f64,
    pub height: f64,
    pub margin_x: f64,
    pub margin_y: f64,
}

impl Axes {
    pub fn new(width: f64, height: f64) -> Result<Self, ReportError> {
        if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
            return Err(ReportError::BadCanvas { width, height });
        }
        Ok(Self {
            width,
            height,
            margin_x: MARGIN_FRACTION * width,
            margin_y: MARGIN_FRACTION * height,
        })
    }

    pub fn x(&self, dis: f64) -> f64 {
        self.margin_x + dis * (self.width - 2.0 * self.margin_x)
    }

    pub fn y(&self, action_score: f64) -> f64 {
        self.height - self.margin_y - action_score * (self.height - 2.0 * self.margin_y)
    }
}

/// Marker radius for `params`, given the √params range of the plotted set.
pub fn marker_radius(params: Option<f64>, sqrt_range: Option<(f64, f64)>) -> f64 {
    match (params, sqrt_range) {
        (Some(p), Some((lo, hi))) if hi > lo => MIN_RADIUS + (MAX_RADIUS - MIN_RADIUS) * (p.sqrt() - lo) / (hi - lo),
        _ => DEFAULT_RADIUS,
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn sqrt_param_range(results: &[EncoderResult]) -> Option<(f64, f64)> {
    results
        .iter()
        .filter_map(|r| r.meta.as_ref().map(|m| m.parameters_millions.sqrt()))
        .fold(None, |acc, s| match acc {
            None => Some((s, s)),
            Some((lo, hi)) => Some((lo.min(s), hi.max(s))),
        })
}

fn marker(out: &mut String, r: &EncoderResult, axes: &Axes, range: Option<(f64, f64)>) {
    let cx = axes.x(r.dis.dis);
    let cy = axes.y(r.as_result.action_score);
    let meta = r.meta.as_ref();
    let radius = marker_radius(meta.map(|m| m.parameters_millions), range);
    let (fill, arch) = match meta.map(|m| m.architecture) {
        Some(Architecture::Cnn) => (CNN_COLOR, "cnn"),
        Some(Architecture::Transformer) => (TRANSFORMER_COLOR, "transformer"),
        None => (NEUTRAL_COLOR, "unknown"),
    };
    let pretraining = meta.map_or("unknown", |m| m.pretraining.token());
    let params = meta.map_or(String::new(), |m| format!(" data-params=\"{:.2}\"", m.parameters_millions));
    let common = format!(
        "class=\"marker\" data-encoder=\"{}\" data-architecture=\"{arch}\" data-pretraining=\"{pretraining}\"{params} fill=\"{fill}\"",
        escape(&r.encoder_id)
    );
    match meta.map(|m| m.pretraining) {
        Some(Pretraining::General) => writeln!(
            out,
            "  <rect {common} x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\"><title>{}</title></rect>",
            cx - radius,
            cy - radius,
            2.0 * radius,
            2.0 * radius,
            escape(&r.encoder_id)
        ),
        _ => writeln!(
            out,
            "  <circle {common} cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"{radius:.2}\"><title>{}</title></circle>",
            escape(&r.encoder_id)
        ),
    }
    .unwrap();
    if let Some(number) = meta.and_then(|m| m.table_number) {
        writeln!(
            out,
            "  <text class=\"label\" x=\"{:.2}\" y=\"{:.2}\">{number}</text>",
            cx + radius + 2.0,
            cy - radius
        )
        .unwrap();
    }
}

fn axes_and_ticks(out: &mut String, axes: &Axes) {
    let (x0, x1) = (axes.x(0.0), axes.x(1.0));
    let (y0, y1) = (axes.y(0.0), axes.y(1.0));
    writeln!(out, "  <g class=\"axes\" stroke=\"#333333\" stroke-width=\"1\">").unwrap();
    writeln!(out, "    <line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x1:.2}\" y2=\"{y0:.2}\"/>").unwrap();
    writeln!(out, "    <line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x0:.2}\" y2=\"{y1:.2}\"/>").unwrap();
    for i in 0..=5 {
        let t = i as f64 / 5.0;
        let (x, y) = (axes.x(t), axes.y(t));
        writeln!(out, "    <line class=\"tick\" x1=\"{x:.2}\" y1=\"{y0:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\"/>", y0 + 5.0).unwrap();
        writeln!(out, "    <line class=\"tick\" x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{x0:.2}\" y2=\"{y:.2}\"/>", x0 - 5.0).unwrap();
    }
    writeln!(out, "  </g>").unwrap();
    writeln!(out, "  <g class=\"tick-labels\" font-size=\"11\" fill=\"#333333\">").unwrap();
    for i in 0..=5 {
        let t = i as f64 / 5.0;
        writeln!(out, "    <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{t:.1}</text>", axes.x(t), y0 + 18.0).unwrap();
        writeln!(out, "    <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{t:.1}</text>", x0 - 8.0, axes.y(t) + 4.0).unwrap();
    }
    writeln!(out, "  </g>").unwrap();
    writeln!(
        out,
        "  <text class=\"axis-title\" x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">Domain Invariance Score (DIS)</text>",
        axes.x(0.5),
        (y0 + 36.0).min(axes.height - 4.0)
    )
    .unwrap();
    writeln!(
        out,
        "  <text class=\"axis-title\" x=\"{0:.2}\" y=\"{1:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 {0:.2} {1:.2})\">Action Score (AS)</text>",
        (x0 - 36.0).max(12.0),
        axes.y(0.5)
    )
    .unwrap();
}

fn legend(out: &mut String, axes: &Axes) {
    let x = axes.x(1.0) - 150.0;
    let top = axes.y(1.0) + 10.0;
    let cx = x + 6.0;
    writeln!(out, "  <g class=\"legend\" font-size=\"11\" fill=\"#333333\">").unwrap();
    let rows: [(&str, &dyn Fn(f64) -> String); 5] = [
        ("CNN", &|y| format!("<circle cx=\"{cx:.2}\" cy=\"{y:.2}\" r=\"5\" fill=\"{CNN_COLOR}\"/>")),
        ("Transformer", &|y| format!("<circle cx=\"{cx:.2}\" cy=\"{y:.2}\" r=\"5\" fill=\"{TRANSFORMER_COLOR}\"/>")),
        ("Manipulation (circle)", &|y| {
            format!("<circle cx=\"{cx:.2}\" cy=\"{y:.2}\" r=\"5\" fill=\"none\" stroke=\"#333333\"/>")
        }),
        ("General (square)", &|y| {
            format!(
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"10\" height=\"10\" fill=\"none\" stroke=\"#333333\"/>",
                cx - 5.0,
                y - 5.0
            )
        }),
        ("Size: parameters", &|y| format!("<circle cx=\"{cx:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"{NEUTRAL_COLOR}\"/>")),
    ];
    for (i, (label, symbol)) in rows.iter().enumerate() {
        let y = top + 16.0 * i as f64;
        writeln!(out, "    {}", symbol(y)).unwrap();
        writeln!(out, "    <text x=\"{:.2}\" y=\"{:.2}\">{}</text>", x + 16.0, y + 4.0, escape(label)).unwrap();
    }
    writeln!(out, "  </g>").unwrap();
}

/// Renders the report as a scatter plot on a `width_px × height_px` canvas.
pub fn emit_scatter_svg(r: &EvaluationReport, width_px: f64, height_px: f64) -> Result<String, ReportError> {
    let axes = Axes::new(width_px, height_px)?;
    let mut out = String::new();
    writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>").unwrap();
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width_px}\" height=\"{height_px}\" viewBox=\"0 0 {width_px} {height_px}\" font-family=\"sans-serif\">"
    )
    .unwrap();
    writeln!(out, "  <title>{}</title>", escape(&r.dataset_name)).unwrap();
    writeln!(out, "  <rect class=\"background\" x=\"0\" y=\"0\" width=\"{width_px}\" height=\"{height_px}\" fill=\"#ffffff\"/>").unwrap();
    axes_and_ticks(&mut out, &axes);
    legend(&mut out, &axes);
    let range = sqrt_param_range(&r.results);
    writeln!(out, "  <g class=\"markers\" fill-opacity=\"0.8\" stroke=\"#222222\" stroke-width=\"0.5\" font-size=\"10\">").unwrap();
    for res in &r.results {
        marker(&mut out, res, &axes, range);
    }
    writeln!(out, "  </g>").unwrap();
    writeln!(out, "</svg>").unwrap();
    Ok(out)
}
