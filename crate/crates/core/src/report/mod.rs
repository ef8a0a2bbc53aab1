//! Result serialization: per-matrix CSV, a canonical JSON bundle, and SVG
//! heatmaps. Every emitter is a pure function of its input, so repeated
//! emission is byte-identical.

mod svg;

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::battery::{BatteryConfig, Cell, Method, ResultMatrix};
use crate::panel::PanelDataset;

pub use svg::{
    diverging_color, pvalue_color, render_heatmap_svg, render_heatmap_svg_masked, sequential_color,
    Palette, ABSENT_COLOR, P_FLOOR,
};

/// Marker written for cells without a value.
pub const MISSING: &str = "-";

/// Formats `v` with 6 significant digits, keeping trailing zeros:
/// `1.00000`, `0.0123457`, `1.23457e-7`. Plain notation is used for
/// decimal exponents in `-5..6`.
pub fn format_sig6(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let v = if v == 0.0 { 0.0 } else { v };
    let sci = format!("{v:.5e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..]
        .parse()
        .expect("integer exponent");
    if (-5..6).contains(&exp) {
        format!("{:.*}", (5 - exp) as usize, v)
    } else {
        sci
    }
}

/// One header row of indicator codes, then one row per region holding the
/// matrix's scalar (or `-`).
pub fn export_csv(matrix: &ResultMatrix) -> String {
    let mut out = String::from("region");
    for c in &matrix.cols {
        out.push(',');
        out.push_str(&csv_field(c));
    }
    out.push('\n');
    for (region, row) in matrix.rows.iter().zip(&matrix.cells) {
        out.push_str(&csv_field(region));
        for cell in row {
            out.push(',');
            match cell.scalar() {
                Some(v) => out.push_str(&format_sig6(v)),
                None => out.push_str(MISSING),
            }
        }
        out.push('\n');
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSizes {
    pub matrix: String,
    /// `n[row][col]`, `None` for skipped cells.
    pub n: Vec<Vec<Option<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleMetadata {
    pub tool: String,
    pub version: String,
    pub config: BatteryConfig,
    /// SHA-256 of the analysed panel.
    pub dataset_fingerprint: String,
    /// Method → name of the scalar its CSV and heatmap report.
    pub scalars: BTreeMap<String, String>,
    pub granger_convention: String,
    pub sample_sizes: Vec<SampleSizes>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportBundle {
    pub metadata: BundleMetadata,
    pub matrices: Vec<ResultMatrix>,
}

impl ExportBundle {
    pub fn new(
        dataset: &PanelDataset,
        config: &BatteryConfig,
        matrices: Vec<ResultMatrix>,
    ) -> Self {
        let scalars = Method::ALL
            .iter()
            .map(|m| (m.as_str().to_string(), m.scalar_name().to_string()))
            .collect();
        let direction = if config.reverse_granger {
            "outcome -> indicator"
        } else {
            "indicator -> outcome"
        };
        let sample_sizes = matrices
            .iter()
            .map(|m| SampleSizes {
                matrix: m.slug(),
                n: m.cells
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|c| match c {
                                Cell::Computed { n, .. } => Some(*n),
                                Cell::Skipped { .. } => None,
                            })
                            .collect()
                    })
                    .collect(),
            })
            .collect();
        ExportBundle {
            metadata: BundleMetadata {
                tool: env!("CARGO_PKG_NAME").into(),
                version: env!("CARGO_PKG_VERSION").into(),
                config: config.clone(),
                dataset_fingerprint: dataset.fingerprint(),
                scalars,
                granger_convention: format!(
                    "p_value at the best lag (argmin p over lags 1..={}, smaller lag on ties); direction {direction}",
                    config.max_lag
                ),
                sample_sizes,
            },
            matrices,
        }
    }
}

/// Pretty-printed JSON with object keys sorted at every level. Infinite
/// floats appear as the strings `"inf"` / `"-inf"`.
pub fn export_json(bundle: &ExportBundle) -> String {
    // serde_json's default map is ordered, so a round trip through `Value`
    // sorts every object's keys
    let value = serde_json::to_value(bundle).expect("bundle serializes");
    let mut text = serde_json::to_string_pretty(&value).expect("value serializes");
    text.push('\n');
    text
}
