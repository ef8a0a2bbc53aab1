//! The four-method battery: every (region, outcome, indicator) cell is
//! tested with each configured method, and the results are assembled into
//! one matrix per method, age group and outcome.
//!
//! Matrix rows are regions in input order and columns are indicators in
//! taxonomy order. A cell that cannot be computed carries a [`SkipReason`]
//! instead of a value; a matrix never fails as a whole.

mod config;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::info::{default_bins, mic, mutual_information, MicResult, MutualInfoResult};
use crate::linear::{pearson, PearsonResult};
use crate::panel::{align_pair, AgeGroup, AlignedPair, Category, PanelDataset};
use crate::temporal::{difference_pair, lag_sweep, GrangerResult};

pub use config::{BatteryConfig, Method, Plan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SkipReason {
    InsufficientOverlap,
    InsufficientData,
    DegenerateInput,
    NonContiguousYears,
    MissingSeries,
    NumericalFailure,
}

impl SkipReason {
    pub fn as_str(self) -> &'static str {
        match self {
            SkipReason::InsufficientOverlap => "insufficient-overlap",
            SkipReason::InsufficientData => "insufficient-data",
            SkipReason::DegenerateInput => "degenerate-input",
            SkipReason::NonContiguousYears => "non-contiguous-years",
            SkipReason::MissingSeries => "missing-series",
            SkipReason::NumericalFailure => "numerical-failure",
        }
    }

    pub fn of_error(e: &Error) -> SkipReason {
        match e {
            Error::InsufficientOverlap { .. } => SkipReason::InsufficientOverlap,
            Error::InsufficientData { .. } => SkipReason::InsufficientData,
            Error::Degenerate(_) | Error::SingularDesign { .. } => SkipReason::DegenerateInput,
            Error::NonContiguous { .. } => SkipReason::NonContiguousYears,
            Error::NotFound { .. } => SkipReason::MissingSeries,
            _ => SkipReason::NumericalFailure,
        }
    }
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagSkip {
    pub lag: usize,
    pub reason: SkipReason,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrangerCell {
    /// `"indicator->outcome"` or `"outcome->indicator"`.
    pub direction: String,
    pub differenced: bool,
    pub best: GrangerResult,
    pub lags: Vec<GrangerResult>,
    pub skipped_lags: Vec<LagSkip>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum CellResult {
    Pearson(PearsonResult),
    MutualInformation(MutualInfoResult),
    Granger(GrangerCell),
    Mic(MicResult),
}

impl CellResult {
    pub fn method(&self) -> Method {
        match self {
            CellResult::Pearson(_) => Method::Pearson,
            CellResult::MutualInformation(_) => Method::MutualInformation,
            CellResult::Granger(_) => Method::Granger,
            CellResult::Mic(_) => Method::Mic,
        }
    }

    /// The value a heatmap shows: r, bits, p-value at the best lag, or MIC.
    pub fn scalar(&self) -> f64 {
        match self {
            CellResult::Pearson(r) => r.r,
            CellResult::MutualInformation(m) => m.mi,
            CellResult::Granger(g) => g.best.p_value,
            CellResult::Mic(m) => m.mic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Cell {
    Computed {
        /// Observations the method saw (after differencing, if any).
        n: usize,
        first_year: i32,
        last_year: i32,
        result: CellResult,
    },
    Skipped {
        reason: SkipReason,
        detail: String,
    },
}

impl Cell {
    fn skipped(e: &Error) -> Cell {
        Cell::Skipped {
            reason: SkipReason::of_error(e),
            detail: e.to_string(),
        }
    }

    pub fn result(&self) -> Option<&CellResult> {
        match self {
            Cell::Computed { result, .. } => Some(result),
            Cell::Skipped { .. } => None,
        }
    }

    pub fn scalar(&self) -> Option<f64> {
        self.result().map(CellResult::scalar)
    }

    pub fn skip_reason(&self) -> Option<SkipReason> {
        match self {
            Cell::Skipped { reason, .. } => Some(*reason),
            Cell::Computed { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultMatrix {
    pub method: Method,
    pub age_group: AgeGroup,
    pub outcome: String,
    /// Region ids.
    pub rows: Vec<String>,
    /// Indicator codes.
    pub cols: Vec<String>,
    pub col_categories: Vec<Category>,
    /// `cells[row][col]`.
    pub cells: Vec<Vec<Cell>>,
}

impl ResultMatrix {
    pub fn get(&self, row: usize, col: usize) -> &Cell {
        &self.cells[row][col]
    }

    pub fn computed_count(&self) -> usize {
        self.cells
            .iter()
            .flatten()
            .filter(|c| c.result().is_some())
            .count()
    }

    pub fn skipped_count(&self) -> usize {
        self.cells
            .iter()
            .flatten()
            .filter(|c| c.result().is_none())
            .count()
    }

    /// `method_agegroup_outcome`, with characters unsafe in file names
    /// replaced by `_`.
    pub fn slug(&self) -> String {
        let raw = format!("{}_{}_{}", self.method, self.age_group, self.outcome);
        raw.chars()
            .map(|c| match c {
                'a'..='z' | 'A'..='Z' | '0'..='9' | '-' | '_' | '.' => c,
                '+' => 'p',
                _ => '_',
            })
            .collect()
    }
}

/// Runs every configured method over every region and every
/// (outcome, indicator) pair.
///
/// Matrices come out ordered by method (config order), then age group, then
/// outcome (config order). Cells are computed in parallel and assembled
/// row-major, so the result does not depend on scheduling.
pub fn run_battery(dataset: &PanelDataset, config: &BatteryConfig) -> Result<Vec<ResultMatrix>> {
    let plan = config.resolve(dataset)?;
    let categories: Vec<Category> = plan
        .indicators
        .iter()
        .map(|c| dataset.indicator(c).expect("resolved code").category)
        .collect();

    let mut shells = Vec::new();
    for &method in &config.methods {
        for age in AgeGroup::ALL {
            for outcome in plan
                .outcomes
                .iter()
                .filter(|o| AgeGroup::of_outcome(o) == age)
            {
                shells.push((method, age, outcome.clone()));
            }
        }
    }

    let regions = dataset.regions();
    let ncols = plan.indicators.len();
    let tasks: Vec<(usize, usize, usize)> = (0..shells.len())
        .flat_map(|m| (0..regions.len()).flat_map(move |r| (0..ncols).map(move |c| (m, r, c))))
        .collect();
    let cells: Vec<Cell> = tasks
        .par_iter()
        .map(|&(m, r, c)| {
            let (method, _, ref outcome) = shells[m];
            compute_cell(
                dataset,
                config,
                method,
                &regions[r],
                outcome,
                &plan.indicators[c],
            )
        })
        .collect();

    let mut cells = cells.into_iter();
    Ok(shells
        .into_iter()
        .map(|(method, age_group, outcome)| {
            let mut grid = Vec::with_capacity(regions.len());
            for _ in regions {
                grid.push(cells.by_ref().take(ncols).collect());
            }
            ResultMatrix {
                method,
                age_group,
                outcome,
                rows: regions.to_vec(),
                cols: plan.indicators.clone(),
                col_categories: categories.clone(),
                cells: grid,
            }
        })
        .collect())
}

fn compute_cell(
    dataset: &PanelDataset,
    config: &BatteryConfig,
    method: Method,
    region: &str,
    outcome: &str,
    indicator: &str,
) -> Cell {
    let (Some(out), Some(ind)) = (
        dataset.series(region, outcome),
        dataset.series(region, indicator),
    ) else {
        let missing = if dataset.series(region, outcome).is_none() {
            outcome
        } else {
            indicator
        };
        return Cell::Skipped {
            reason: SkipReason::MissingSeries,
            detail: format!("no {missing} series for region {region}"),
        };
    };
    // x = indicator, y = outcome
    let pair = match align_pair(ind, out, config.min_overlap) {
        Ok(p) => p,
        Err(e) => return Cell::skipped(&e),
    };
    match evaluate(&pair, config, method) {
        Ok((used, result)) => Cell::Computed {
            n: used.n(),
            first_year: used.years()[0],
            last_year: *used.years().last().expect("non-empty pair"),
            result,
        },
        Err(e) => Cell::skipped(&e),
    }
}

fn evaluate(
    pair: &AlignedPair,
    config: &BatteryConfig,
    method: Method,
) -> Result<(AlignedPair, CellResult)> {
    match method {
        Method::Pearson => Ok((pair.clone(), CellResult::Pearson(pearson(pair)?))),
        Method::MutualInformation => {
            let bins = config
                .mi_bins
                .unwrap_or_else(|| default_bins(pair.n()).max(2));
            let res = mutual_information(pair, bins, config.mi_strategy)?;
            Ok((pair.clone(), CellResult::MutualInformation(res)))
        }
        Method::Mic => Ok((
            pair.clone(),
            CellResult::Mic(mic(pair, &config.mic_params())?),
        )),
        Method::Granger => {
            let oriented = if config.reverse_granger {
                pair.swapped()
            } else {
                pair.clone()
            };
            let used = if config.difference_first {
                difference_pair(&oriented)?
            } else {
                oriented
            };
            let sweep = lag_sweep(&used, config.max_lag)?;
            let best = *sweep.best().expect("lag 1 always present");
            let cell = GrangerCell {
                direction: if config.reverse_granger {
                    "outcome->indicator".into()
                } else {
                    "indicator->outcome".into()
                },
                differenced: config.difference_first,
                best,
                lags: sweep.results,
                skipped_lags: sweep
                    .skipped
                    .iter()
                    .map(|(lag, e)| LagSkip {
                        lag: *lag,
                        reason: SkipReason::of_error(e),
                        detail: e.to_string(),
                    })
                    .collect(),
            };
            Ok((used, CellResult::Granger(cell)))
        }
    }
}

/// Best-lag counts for one (indicator category, outcome) group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagSummaryRow {
    pub outcome: String,
    pub category: Category,
    /// Best lag → number of cells where it was best.
    pub counts: BTreeMap<usize, usize>,
}

impl LagSummaryRow {
    /// Most frequent best lag; the smaller lag wins a tie.
    pub fn modal_lag(&self) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None;
        for (&lag, &count) in &self.counts {
            if best.map_or(true, |(_, c)| count > c) {
                best = Some((lag, count));
            }
        }
        best.map(|(lag, _)| lag)
    }
}

/// Tallies best lags across regions for every (outcome, category) group of
/// the given Granger matrices. Groups without any computed cell are left
/// out. Rows follow the outcome order of the input, then category order.
pub fn summarize_lags(matrices: &[ResultMatrix]) -> Result<Vec<LagSummaryRow>> {
    let mut rows: Vec<LagSummaryRow> = Vec::new();
    for m in matrices {
        if m.method != Method::Granger {
            return Err(Error::WrongMethod {
                expected: Method::Granger.to_string(),
                found: m.method.to_string(),
            });
        }
        let mut groups: BTreeMap<Category, BTreeMap<usize, usize>> = BTreeMap::new();
        for row in &m.cells {
            for (cell, &cat) in row.iter().zip(&m.col_categories) {
                if let Some(CellResult::Granger(g)) = cell.result() {
                    *groups
                        .entry(cat)
                        .or_default()
                        .entry(g.best.lag)
                        .or_default() += 1;
                }
            }
        }
        for (category, counts) in groups {
            match rows
                .iter_mut()
                .find(|r| r.outcome == m.outcome && r.category == category)
            {
                Some(existing) => {
                    for (lag, c) in counts {
                        *existing.counts.entry(lag).or_default() += c;
                    }
                }
                None => rows.push(LagSummaryRow {
                    outcome: m.outcome.clone(),
                    category,
                    counts,
                }),
            }
        }
    }
    Ok(rows)
}
