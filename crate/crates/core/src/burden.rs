//! Disease-burden arithmetic: years of life lost, years lived with
//! disability, their sum, and direct age standardization.
//!
//! Age bands are opaque labels. Nothing here interprets band boundaries;
//! all formulas are keyed sums over bands.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Per-band quantities keyed by band label.
pub type BandValues = BTreeMap<String, f64>;

/// Standard life expectancy per age band.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LifeTable {
    entries: BandValues,
}

impl LifeTable {
    pub fn new(entries: BandValues) -> Result<Self> {
        check_non_negative(&entries, "life expectancy")?;
        Ok(LifeTable { entries })
    }

    pub fn get(&self, band: &str) -> Option<f64> {
        self.entries.get(band).copied()
    }
}

/// Disability weight per (condition, band), each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DisabilityWeights {
    entries: BTreeMap<(String, String), f64>,
}

impl DisabilityWeights {
    pub fn new(entries: BTreeMap<(String, String), f64>) -> Result<Self> {
        for ((condition, band), &w) in &entries {
            if !(0.0..=1.0).contains(&w) {
                return Err(Error::domain(format!(
                    "disability weight {w} for {condition}/{band} outside [0, 1]"
                )));
            }
        }
        Ok(DisabilityWeights { entries })
    }

    pub fn get(&self, condition: &str, band: &str) -> Option<f64> {
        self.entries
            .get(&(condition.to_string(), band.to_string()))
            .copied()
    }

    pub fn conditions(&self) -> Vec<&str> {
        let mut c: Vec<&str> = self.entries.keys().map(|(c, _)| c.as_str()).collect();
        c.dedup();
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BurdenSummary {
    pub yll: f64,
    pub yld: f64,
    pub daly: f64,
}

/// Σ deaths × standard life expectancy over bands.
pub fn compute_yll(deaths: &BandValues, table: &LifeTable) -> Result<f64> {
    check_non_negative(deaths, "deaths")?;
    deaths.iter().try_fold(0.0, |acc, (band, &d)| {
        let l = table
            .get(band)
            .ok_or_else(|| Error::MissingBand(band.clone()))?;
        Ok(acc + d * l)
    })
}

/// Σ prevalence × disability weight over bands, for one condition.
pub fn compute_yld(
    prevalence: &BandValues,
    weights: &DisabilityWeights,
    condition: &str,
) -> Result<f64> {
    check_non_negative(prevalence, "prevalence")?;
    prevalence.iter().try_fold(0.0, |acc, (band, &p)| {
        let w = weights
            .get(condition, band)
            .ok_or_else(|| Error::MissingWeight {
                condition: condition.to_string(),
                band: band.clone(),
            })?;
        Ok(acc + p * w)
    })
}

pub fn compute_daly(yll: f64, yld: f64) -> Result<BurdenSummary> {
    for (name, v) in [("YLL", yll), ("YLD", yld)] {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::domain(format!(
                "{name} must be finite and non-negative, got {v}"
            )));
        }
    }
    Ok(BurdenSummary {
        yll,
        yld,
        daly: yll + yld,
    })
}

/// Tolerance on the standard-population weight total.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Direct standardization: Σ rate × standard-population weight. The weight
/// bands must match the rate bands exactly and sum to one.
pub fn age_standardize(rates: &BandValues, weights: &BandValues) -> Result<f64> {
    check_non_negative(weights, "standard-population weight")?;
    let total: f64 = weights.values().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(Error::Normalization(total));
    }
    if let Some(band) = weights.keys().find(|b| !rates.contains_key(*b)) {
        return Err(Error::MissingBand(band.clone()));
    }
    rates.iter().try_fold(0.0, |acc, (band, &r)| {
        let w = weights
            .get(band)
            .ok_or_else(|| Error::MissingBand(band.clone()))?;
        Ok(acc + r * w)
    })
}

fn check_non_negative(values: &BandValues, what: &str) -> Result<()> {
    match values.iter().find(|(_, &v)| !(v >= 0.0) || !v.is_finite()) {
        Some((band, v)) => Err(Error::domain(format!("{what} for band {band:?} is {v}"))),
        None => Ok(()),
    }
}

/// Reads `band,value` rows. A header row whose value column is not numeric
/// is skipped.
pub fn parse_band_csv(text: &str) -> Result<BandValues> {
    let mut out = BandValues::new();
    for (line, fields) in csv_rows(text, 2)? {
        let Some(v) = parse_value(&fields[1], line, out.is_empty())? else {
            continue;
        };
        if out.insert(fields[0].clone(), v).is_some() {
            return Err(Error::DuplicateKey(fields[0].clone()));
        }
    }
    Ok(out)
}

/// Reads `condition,band,value` rows into disability weights.
pub fn parse_weights_csv(text: &str) -> Result<DisabilityWeights> {
    let mut out = BTreeMap::new();
    for (line, fields) in csv_rows(text, 3)? {
        let Some(v) = parse_value(&fields[2], line, out.is_empty())? else {
            continue;
        };
        let key = (fields[0].clone(), fields[1].clone());
        if out.insert(key, v).is_some() {
            return Err(Error::DuplicateKey(format!("{}/{}", fields[0], fields[1])));
        }
    }
    DisabilityWeights::new(out)
}

fn csv_rows(text: &str, width: usize) -> Result<Vec<(usize, Vec<String>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            Error::parse(
                e.position().map(|p| p.line() as usize).unwrap_or(0),
                None,
                e.to_string(),
            )
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() != width {
            return Err(Error::parse(
                line,
                None,
                format!("expected {width} fields, found {}", record.len()),
            ));
        }
        rows.push((line, record.iter().map(str::to_string).collect()));
    }
    Ok(rows)
}

fn parse_value(cell: &str, line: usize, header_allowed: bool) -> Result<Option<f64>> {
    match cell.parse::<f64>() {
        Ok(v) => Ok(Some(v)),
        Err(_) if header_allowed && line == 1 => Ok(None),
        Err(_) => Err(Error::parse(
            line,
            None,
            format!("non-numeric value {cell:?}"),
        )),
    }
}
