//! Wide layout: one row per (indicator, region), one column per year.
//!
//! ```text
//! code,region,1991,1992,1993
//! E1,global,23.9,25.5,26.0
//! ED4,global,-,-,4.1
//! ```
//!
//! The region column is optional; without it every row belongs to the
//! default region. Missing values are `-` or empty.

use std::fmt::Write as _;

use super::{indicator_lookup, AnnualSeries, IndicatorCode, PanelBuilder, PanelDataset};
use crate::error::{Error, Result};

pub const DEFAULT_REGION: &str = "global";

pub fn parse_wdi_wide(text: &str) -> Result<PanelDataset> {
    parse_wdi_wide_with_region(text, DEFAULT_REGION)
}

/// Like [`parse_wdi_wide`], assigning `region` to rows when the file has no
/// region column.
pub fn parse_wdi_wide_with_region(text: &str, region: &str) -> Result<PanelDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();

    let header = match records.next() {
        None => return Err(Error::parse(1, None, "no header")),
        Some(r) => r.map_err(csv_error)?,
    };
    if header.len() < 2 {
        return Err(Error::parse(
            1,
            None,
            "header needs a code column and at least one year",
        ));
    }
    let has_region = parse_year(&header[1]).is_none();
    let first_year_col = if has_region { 2 } else { 1 };
    let mut years = Vec::with_capacity(header.len() - first_year_col);
    for (col, cell) in header.iter().enumerate().skip(first_year_col) {
        match parse_year(cell) {
            Some(y) => years.push(y),
            None => {
                return Err(Error::parse(
                    1,
                    Some(col + 1),
                    format!("expected a four-digit year, found {cell:?}"),
                ))
            }
        }
    }
    if years.is_empty() {
        return Err(Error::parse(1, None, "header has no year columns"));
    }
    if years.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::parse(
            1,
            None,
            "year columns must be strictly increasing",
        ));
    }

    let mut builder = PanelBuilder::default();
    for record in records {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != first_year_col + years.len() {
            return Err(Error::parse(
                line,
                None,
                format!(
                    "expected {} fields, found {}",
                    first_year_col + years.len(),
                    record.len()
                ),
            ));
        }
        let key = &record[0];
        if key.is_empty() {
            return Err(Error::parse(line, Some(1), "empty indicator code"));
        }
        let row_region = if has_region { &record[1] } else { region };
        if row_region.is_empty() {
            return Err(Error::parse(line, Some(2), "empty region id"));
        }

        let mut obs = Vec::with_capacity(years.len());
        for (j, &year) in years.iter().enumerate() {
            let col = first_year_col + j;
            let cell = &record[col];
            let value = if cell.is_empty() || cell == "-" {
                None
            } else {
                match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => Some(v),
                    _ => {
                        return Err(Error::parse(
                            line,
                            Some(col + 1),
                            format!("non-numeric value {cell:?}"),
                        ))
                    }
                }
            };
            obs.push((year, value));
        }
        if obs.iter().all(|(_, v)| v.is_none()) {
            // rows with no observations carry nothing to analyze
            continue;
        }
        let indicator = indicator_lookup(key).unwrap_or_else(|_| IndicatorCode::outcome(key));
        let series = AnnualSeries::from_observations(obs)
            .map_err(|e| Error::parse(line, None, e.to_string()))?;
        builder.insert(row_region, indicator, series)?;
    }
    builder.finish()
}

fn parse_year(s: &str) -> Option<i32> {
    if s.len() == 4 && s.bytes().all(|b| b.is_ascii_digit()) {
        s.parse().ok()
    } else {
        None
    }
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::parse(line, None, e.to_string())
}

pub(super) fn write_wide(ds: &PanelDataset) -> String {
    let mut out = String::from("code,region");
    let Some((first, last)) = ds.year_span() else {
        out.push('\n');
        return out;
    };
    for y in first..=last {
        let _ = write!(out, ",{y}");
    }
    out.push('\n');
    for region in ds.regions() {
        for ind in ds.indicators() {
            let Some(series) = ds.series(region, &ind.code) else {
                continue;
            };
            let _ = write!(out, "{},{}", ind.code, region);
            for y in first..=last {
                match series.value_at(y) {
                    Some(v) => {
                        let _ = write!(out, ",{v}");
                    }
                    None => out.push_str(",-"),
                }
            }
            out.push('\n');
        }
    }
    out
}
