//! Region × indicator × year panels.
//!
//! A [`PanelDataset`] holds one [`AnnualSeries`] per (region, indicator)
//! cell. Series are missing-aware: a year may be present in the span of a
//! series and still carry no value. Pairwise analyses never see the gaps;
//! they work on an [`AlignedPair`] produced by [`align_pair`], which keeps
//! only the years where both series are populated.

mod align;
mod fixture;
mod gbd;
mod indicators;
mod wdi;

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

pub use align::{align_pair, AlignedPair, DEFAULT_MIN_OVERLAP};
pub use fixture::{fixture_dataset, synthetic_outcome, FIXTURE_CSV};
pub use gbd::{outcome_code, parse_gbd_long, Measure};
pub use indicators::{
    builtin_indicators, builtin_position, indicator_lookup, Category, IndicatorCode,
};
pub use wdi::{parse_wdi_wide, parse_wdi_wide_with_region, DEFAULT_REGION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AgeGroup {
    #[serde(rename = "20-39")]
    Age20to39,
    #[serde(rename = "40+")]
    Age40plus,
    #[serde(rename = "all")]
    AllAges,
}

impl AgeGroup {
    pub const ALL: [AgeGroup; 3] = [AgeGroup::Age20to39, AgeGroup::Age40plus, AgeGroup::AllAges];

    /// Canonical short tag, as used inside outcome codes.
    pub fn tag(self) -> &'static str {
        match self {
            AgeGroup::Age20to39 => "20-39",
            AgeGroup::Age40plus => "40+",
            AgeGroup::AllAges => "all",
        }
    }

    /// Accepts the canonical tags plus the common spellings found in
    /// burden-of-disease exports ("20-39 years", "40 plus", "All ages", ...).
    pub fn parse(s: &str) -> Result<AgeGroup> {
        let k: String = s
            .trim()
            .to_lowercase()
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect();
        let k = k.strip_suffix("years").unwrap_or(&k);
        match k {
            "20-39" | "20to39" | "age20to39" | "20–39" => Ok(AgeGroup::Age20to39),
            "40+" | "40plus" | "age40plus" | "40andover" => Ok(AgeGroup::Age40plus),
            "all" | "allages" | "agestandardized" | "age-standardized" => Ok(AgeGroup::AllAges),
            _ => Err(Error::UnknownAgeGroup(s.to_string())),
        }
    }

    /// Age group encoded in an outcome code of the form `cause:age:measure`.
    /// Codes without one are treated as all-ages outcomes.
    pub fn of_outcome(code: &str) -> AgeGroup {
        let parts: Vec<&str> = code.split(':').collect();
        match parts.as_slice() {
            [_, age, _] => AgeGroup::parse(age).unwrap_or(AgeGroup::AllAges),
            _ => AgeGroup::AllAges,
        }
    }
}

impl fmt::Display for AgeGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// One value slot per calendar year over a contiguous span.
///
/// The span is trimmed so that its first and last years carry values; any
/// year inside the span may be missing. Two series built from the same
/// (year, value) observations compare equal regardless of how many missing
/// markers surrounded them in the source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnualSeries {
    start: i32,
    values: Vec<Option<f64>>,
}

impl AnnualSeries {
    /// Builds a series from (year, value) observations. Years must be
    /// strictly increasing and at least one value must be present.
    pub fn from_observations<I>(obs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i32, Option<f64>)>,
    {
        let mut last: Option<i32> = None;
        let mut present: Vec<(i32, f64)> = Vec::new();
        for (year, value) in obs {
            if let Some(prev) = last {
                if year <= prev {
                    return Err(Error::domain(format!(
                        "years must be strictly increasing ({prev} then {year})"
                    )));
                }
            }
            last = Some(year);
            if let Some(v) = value {
                if !v.is_finite() {
                    return Err(Error::domain(format!("non-finite value in {year}")));
                }
                present.push((year, v));
            }
        }
        let (Some(&(start, _)), Some(&(end, _))) = (present.first(), present.last()) else {
            return Err(Error::domain("series has no observed values"));
        };
        let mut values = vec![None; (end - start + 1) as usize];
        for (year, v) in present {
            values[(year - start) as usize] = Some(v);
        }
        Ok(AnnualSeries { start, values })
    }

    /// Convenience for a fully observed run of years starting at `start`.
    pub fn contiguous(start: i32, values: &[f64]) -> Result<Self> {
        Self::from_observations(
            values
                .iter()
                .enumerate()
                .map(|(i, &v)| (start + i as i32, Some(v))),
        )
    }

    pub fn first_year(&self) -> i32 {
        self.start
    }

    pub fn last_year(&self) -> i32 {
        self.start + self.values.len() as i32 - 1
    }

    pub fn value_at(&self, year: i32) -> Option<f64> {
        if year < self.start {
            return None;
        }
        self.values
            .get((year - self.start) as usize)
            .copied()
            .flatten()
    }

    /// Every year in the span with its (optional) value.
    pub fn iter(&self) -> impl Iterator<Item = (i32, Option<f64>)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (self.start + i as i32, *v))
    }

    /// Only the populated years.
    pub fn observed(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.iter().filter_map(|(y, v)| v.map(|v| (y, v)))
    }

    pub fn observed_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }
}

/// Immutable region × indicator panel.
///
/// Regions keep their input order. Indicators are kept in canonical order:
/// built-in taxonomy codes first (taxonomy order), then every other code
/// sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelDataset {
    regions: Vec<String>,
    indicators: Vec<IndicatorCode>,
    cells: BTreeMap<(String, String), AnnualSeries>,
}

impl PanelDataset {
    /// Builds a panel from `(region, indicator, series)` cells. A repeated
    /// (region, code) pair is a duplicate-key error.
    pub fn from_cells<I>(cells: I) -> Result<PanelDataset>
    where
        I: IntoIterator<Item = (String, IndicatorCode, AnnualSeries)>,
    {
        let mut b = PanelBuilder::default();
        for (region, indicator, series) in cells {
            b.insert(&region, indicator, series)?;
        }
        b.finish()
    }

    pub fn regions(&self) -> &[String] {
        &self.regions
    }

    pub fn indicators(&self) -> &[IndicatorCode] {
        &self.indicators
    }

    pub fn indicator(&self, code: &str) -> Option<&IndicatorCode> {
        self.indicators.iter().find(|i| i.code == code)
    }

    pub fn series(&self, region: &str, code: &str) -> Option<&AnnualSeries> {
        self.cells.get(&(region.to_string(), code.to_string()))
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Inclusive year span over every cell.
    pub fn year_span(&self) -> Option<(i32, i32)> {
        let first = self.cells.values().map(AnnualSeries::first_year).min()?;
        let last = self.cells.values().map(AnnualSeries::last_year).max()?;
        Some((first, last))
    }

    /// Combines two panels. Regions of `other` not already present are
    /// appended in their order; a (region, code) cell present in both is a
    /// duplicate-key error.
    pub fn merge(&self, other: &PanelDataset) -> Result<PanelDataset> {
        let mut b = PanelBuilder::default();
        for ds in [self, other] {
            for region in &ds.regions {
                for ind in &ds.indicators {
                    if let Some(s) = ds.series(region, &ind.code) {
                        b.insert(region, ind.clone(), s.clone())?;
                    }
                }
            }
        }
        b.finish()
    }

    /// Serializes to the wide CSV layout with an explicit region column.
    /// Parsing the result with [`parse_wdi_wide`] reproduces this dataset.
    pub fn to_wdi_wide(&self) -> String {
        wdi::write_wide(self)
    }

    /// SHA-256 of the canonical wide serialization, hex encoded.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(self.to_wdi_wide().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Accumulates cells and enforces the panel invariants on `finish`.
#[derive(Debug, Default)]
pub(crate) struct PanelBuilder {
    regions: Vec<String>,
    indicators: Vec<IndicatorCode>,
    cells: BTreeMap<(String, String), AnnualSeries>,
}

impl PanelBuilder {
    pub(crate) fn insert(
        &mut self,
        region: &str,
        indicator: IndicatorCode,
        series: AnnualSeries,
    ) -> Result<()> {
        let key = (region.to_string(), indicator.code.clone());
        if self.cells.contains_key(&key) {
            return Err(Error::DuplicateKey(format!("{region}/{}", indicator.code)));
        }
        match self.indicators.iter().find(|i| i.code == indicator.code) {
            Some(existing) if *existing != indicator => {
                return Err(Error::DuplicateKey(format!(
                    "indicator {} declared with conflicting metadata",
                    indicator.code
                )));
            }
            Some(_) => {}
            None => self.indicators.push(indicator),
        }
        if !self.regions.iter().any(|r| r == region) {
            self.regions.push(region.to_string());
        }
        self.cells.insert(key, series);
        Ok(())
    }

    pub(crate) fn finish(mut self) -> Result<PanelDataset> {
        self.indicators
            .sort_by(|a, b| indicator_order(&a.code, &b.code));
        Ok(PanelDataset {
            regions: self.regions,
            indicators: self.indicators,
            cells: self.cells,
        })
    }
}

/// Canonical column order: taxonomy codes first, then the rest by name.
pub fn indicator_order(a: &str, b: &str) -> std::cmp::Ordering {
    match (builtin_position(a), builtin_position(b)) {
        (Some(x), Some(y)) => x.cmp(&y),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => a.cmp(b),
    }
}
