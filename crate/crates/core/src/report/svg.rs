//! Heatmap rendering. Indicators run along the x-axis and regions down the
//! y-axis; every cell is one `<rect class="cell">` with a `<title>` tooltip.
//!
//! Colour mapping:
//!
//! - diverging (signed values, fixed to `[-1, 1]`): `v ≥ 0` blends white
//!   into `#ff0000`, `v < 0` blends white into `#0000ff`, both linearly in
//!   `|v|`;
//! - sequential (non-negative values): `t = v / max` over the matrix, a
//!   linear blend from white to `#08306b`;
//! - p-value: `t = −log10(max(p, 1e-6)) / 6`, the same white-to-`#08306b`
//!   blend, so smaller p is darker;
//! - absent cells are `#bdbdbd`.

use std::fmt::Write;

use crate::battery::{Cell, CellResult, Method, ResultMatrix};
use crate::error::{Error, Result};

use super::format_sig6;

pub const ABSENT_COLOR: &str = "#bdbdbd";
/// Smallest p-value the p-value ramp distinguishes.
pub const P_FLOOR: f64 = 1e-6;

const DARK: (f64, f64, f64) = (8.0, 48.0, 107.0);
const CELL_W: usize = 44;
const CELL_H: usize = 28;
const LEFT: usize = 120;
const TOP: usize = 36;
const BOTTOM: usize = 40;
const RIGHT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Palette {
    Diverging,
    Sequential,
    PValue,
}

impl Palette {
    pub fn for_method(method: Method) -> Palette {
        match method {
            Method::Pearson => Palette::Diverging,
            Method::MutualInformation | Method::Mic => Palette::Sequential,
            Method::Granger => Palette::PValue,
        }
    }

    fn describe(self) -> &'static str {
        match self {
            Palette::Diverging => "blue (-1) to white (0) to red (+1)",
            Palette::Sequential => "white (0) to dark blue (matrix maximum)",
            Palette::PValue => "white (p = 1) to dark blue (p <= 1e-6), log scale",
        }
    }
}

fn hex(r: f64, g: f64, b: f64) -> String {
    let c = |v: f64| v.round().clamp(0.0, 255.0) as u8;
    format!("#{:02x}{:02x}{:02x}", c(r), c(g), c(b))
}

/// Colour of a signed value on the fixed `[-1, 1]` scale.
pub fn diverging_color(v: f64) -> String {
    let v = v.clamp(-1.0, 1.0);
    let fade = 255.0 * (1.0 - v.abs());
    if v >= 0.0 {
        hex(255.0, fade, fade)
    } else {
        hex(fade, fade, 255.0)
    }
}

/// Colour of `t ∈ [0, 1]` on the white-to-dark ramp.
pub fn sequential_color(t: f64) -> String {
    let t = if t.is_nan() { 0.0 } else { t.clamp(0.0, 1.0) };
    let blend = |d: f64| 255.0 + t * (d - 255.0);
    hex(blend(DARK.0), blend(DARK.1), blend(DARK.2))
}

pub fn pvalue_color(p: f64) -> String {
    let p = p.clamp(P_FLOOR, 1.0);
    sequential_color(-p.log10() / -P_FLOOR.log10())
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

pub fn render_heatmap_svg(matrix: &ResultMatrix, palette: Palette) -> Result<String> {
    render_heatmap_svg_masked(matrix, palette, None)
}

/// Like [`render_heatmap_svg`], fading every cell whose p-value exceeds
/// `p_mask`. Only Pearson and Granger cells carry a p-value; the mask leaves
/// other methods untouched.
pub fn render_heatmap_svg_masked(
    matrix: &ResultMatrix,
    palette: Palette,
    p_mask: Option<f64>,
) -> Result<String> {
    if matrix.rows.is_empty() || matrix.cols.is_empty() {
        return Err(Error::domain("cannot render an empty matrix"));
    }
    if let Some(a) = p_mask {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::domain(format!(
                "p-value mask must lie in [0, 1], got {a}"
            )));
        }
    }
    let max = matrix
        .cells
        .iter()
        .flatten()
        .filter_map(|c| c.scalar())
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::max);
    let color = |v: f64| match palette {
        Palette::Diverging => diverging_color(v),
        Palette::Sequential => sequential_color(if max > 0.0 { v / max } else { 0.0 }),
        Palette::PValue => pvalue_color(v),
    };

    let width = LEFT + matrix.cols.len() * CELL_W + RIGHT;
    let height = TOP + matrix.rows.len() * CELL_H + BOTTOM;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        s,
        r#"<text class="title" x="{LEFT}" y="14">{} | {} | age {}</text>"#,
        matrix.method,
        escape(&matrix.outcome),
        matrix.age_group
    );
    let _ = writeln!(
        s,
        r#"<text class="scale" x="{LEFT}" y="28" font-size="9">{}: {}</text>"#,
        matrix.method.scalar_name(),
        escape(palette.describe())
    );
    for (i, region) in matrix.rows.iter().enumerate() {
        let y = TOP + i * CELL_H + CELL_H / 2 + 4;
        let _ = writeln!(
            s,
            r#"<text class="row-label" x="{}" y="{y}" text-anchor="end">{}</text>"#,
            LEFT - 6,
            escape(region)
        );
    }
    for (j, code) in matrix.cols.iter().enumerate() {
        let x = LEFT + j * CELL_W + CELL_W / 2;
        let y = TOP + matrix.rows.len() * CELL_H + 16;
        let _ = writeln!(
            s,
            r#"<text class="col-label" x="{x}" y="{y}" text-anchor="middle">{}</text>"#,
            escape(code)
        );
    }
    for (i, row) in matrix.cells.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            let (x, y) = (LEFT + j * CELL_W, TOP + i * CELL_H);
            let mut opacity = "";
            let (fill, tip) = match (cell.scalar(), cell) {
                (Some(v), Cell::Computed { n, result, .. }) => {
                    let mut tip = format!(
                        "{} / {}: {} (n = {n})",
                        matrix.rows[i],
                        matrix.cols[j],
                        format_sig6(v)
                    );
                    if let (Some(a), Some(p)) = (p_mask, p_value(result)) {
                        if p > a {
                            opacity = r#" fill-opacity="0.25""#;
                            let _ = write!(tip, ", masked: p = {} > {a}", format_sig6(p));
                        }
                    }
                    (color(v), tip)
                }
                (_, Cell::Skipped { reason, detail }) => (
                    ABSENT_COLOR.to_string(),
                    format!(
                        "{} / {}: skipped, {reason} ({detail})",
                        matrix.rows[i], matrix.cols[j]
                    ),
                ),
                _ => unreachable!("computed cells carry a scalar"),
            };
            let _ = writeln!(
                s,
                r##"<rect class="cell" x="{x}" y="{y}" width="{CELL_W}" height="{CELL_H}" fill="{fill}"{opacity} stroke="#ffffff"><title>{}</title></rect>"##,
                escape(&tip)
            );
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn p_value(result: &CellResult) -> Option<f64> {
    match result {
        CellResult::Pearson(r) => Some(r.p_value),
        CellResult::Granger(g) => Some(g.best.p_value),
        CellResult::MutualInformation(_) | CellResult::Mic(_) => None,
    }
}
