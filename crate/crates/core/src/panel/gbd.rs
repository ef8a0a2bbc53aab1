//! Long layout: one row per (location, age group, cause, measure, year).
//!
//! Every (cause, age group, measure) triple becomes one outcome series whose
//! code is `cause:age:measure`, e.g. `depressive:20-39:DALYs`. Locations
//! become regions in order of first appearance.

use std::collections::BTreeMap;

use super::{AgeGroup, AnnualSeries, IndicatorCode, PanelBuilder, PanelDataset};
use crate::error::{Error, Result};

const COLUMNS: [&str; 6] = ["location", "age_group", "cause", "measure", "year", "value"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    Dalys,
    Ylls,
    Ylds,
    Prevalence,
    Deaths,
}

impl Measure {
    pub fn parse(s: &str) -> Option<Measure> {
        match s.trim().to_lowercase().as_str() {
            "dalys" | "daly" => Some(Measure::Dalys),
            "ylls" | "yll" => Some(Measure::Ylls),
            "ylds" | "yld" => Some(Measure::Ylds),
            "prevalence" => Some(Measure::Prevalence),
            "deaths" => Some(Measure::Deaths),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Measure::Dalys => "DALYs",
            Measure::Ylls => "YLLs",
            Measure::Ylds => "YLDs",
            Measure::Prevalence => "prevalence",
            Measure::Deaths => "deaths",
        }
    }
}

/// Synthetic code for an outcome series.
pub fn outcome_code(cause: &str, age: AgeGroup, measure: Measure) -> String {
    format!("{cause}:{}:{}", age.tag(), measure.as_str())
}

pub fn parse_gbd_long(text: &str) -> Result<PanelDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let header = match records.next() {
        None => return Err(Error::parse(1, None, "no header")),
        Some(r) => r.map_err(|e| Error::parse(1, None, e.to_string()))?,
    };
    let mut index = [0usize; 6];
    for (slot, name) in index.iter_mut().zip(COLUMNS) {
        *slot = header
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::parse(1, None, format!("missing column {name:?}")))?;
    }
    let [loc_i, age_i, cause_i, measure_i, year_i, value_i] = index;

    // (location, code) in first-appearance order, with per-year values
    let mut order: Vec<(String, String)> = Vec::new();
    let mut groups: BTreeMap<(String, String), BTreeMap<i32, Option<f64>>> = BTreeMap::new();

    for record in records {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Error::parse(line, None, e.to_string())
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let location = &record[loc_i];
        let cause = &record[cause_i];
        if location.is_empty() || cause.is_empty() {
            return Err(Error::parse(line, None, "empty location or cause"));
        }
        let age = AgeGroup::parse(&record[age_i])?;
        let measure = Measure::parse(&record[measure_i]).ok_or_else(|| {
            Error::parse(
                line,
                Some(measure_i + 1),
                format!("unknown measure {:?}", &record[measure_i]),
            )
        })?;
        let year: i32 = record[year_i].parse().map_err(|_| {
            Error::parse(
                line,
                Some(year_i + 1),
                format!("bad year {:?}", &record[year_i]),
            )
        })?;
        let raw = &record[value_i];
        let value = if raw.is_empty() || raw == "-" {
            None
        } else {
            match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => Some(v),
                _ => {
                    return Err(Error::parse(
                        line,
                        Some(value_i + 1),
                        format!("non-numeric value {raw:?}"),
                    ))
                }
            }
        };

        let key = (location.to_string(), outcome_code(cause, age, measure));
        let years = groups.entry(key.clone()).or_insert_with(|| {
            order.push(key.clone());
            BTreeMap::new()
        });
        if years.insert(year, value).is_some() {
            return Err(Error::DuplicateKey(format!(
                "{location}/{cause}/{}/{}/{year}",
                age.tag(),
                measure.as_str()
            )));
        }
    }

    let mut builder = PanelBuilder::default();
    for key in order {
        let years = &groups[&key];
        if years.values().all(Option::is_none) {
            continue;
        }
        let series = AnnualSeries::from_observations(years.iter().map(|(&y, &v)| (y, v)))?;
        builder.insert(&key.0, IndicatorCode::outcome(key.1.clone()), series)?;
    }
    builder.finish()
}
