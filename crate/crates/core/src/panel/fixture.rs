//! The embedded annual indicator table (1991–2023, 15 indicators, one
//! `global` region) and a seeded generator for synthetic outcome series.
//!
//! No outcome data ships with the table, so pipelines that need one use
//! [`synthetic_outcome`]. Its values are made up and only exist to exercise
//! the analysis end to end.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{parse_wdi_wide, AnnualSeries, IndicatorCode, PanelBuilder, PanelDataset};
use crate::error::{Error, Result};

pub const FIXTURE_CSV: &str = include_str!("../../data/indicators.csv");

pub fn fixture_dataset() -> PanelDataset {
    parse_wdi_wide(FIXTURE_CSV).expect("embedded fixture parses")
}

/// Returns `dataset` plus one synthetic outcome series for `region`.
///
/// The series covers the dataset's year span and follows
/// `500 + 40·z(S2[t−1]) − 30·z(ED3[t−3]) + ε`, with `z` the z-score of the
/// driver over its observed years and `ε ~ N(0, 5²)` drawn from a ChaCha8
/// stream seeded with `seed`. A driver term is dropped where its lagged
/// value is unavailable.
pub fn synthetic_outcome(
    dataset: &PanelDataset,
    region: &str,
    code: &str,
    seed: u64,
) -> Result<PanelDataset> {
    let (first, last) = dataset
        .year_span()
        .ok_or_else(|| Error::domain("dataset is empty"))?;
    let unemployment = dataset.series(region, "S2").map(zscores);
    let tertiary = dataset.series(region, "ED3").map(zscores);
    let lookup = |z: &Option<(AnnualSeries, f64, f64)>, year: i32| {
        z.as_ref()
            .and_then(|(s, mean, sd)| s.value_at(year).map(|v| (v - mean) / sd))
            .unwrap_or(0.0)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 5.0).expect("valid normal");
    let obs: Vec<(i32, Option<f64>)> = (first..=last)
        .map(|t| {
            let v = 500.0 + 40.0 * lookup(&unemployment, t - 1) - 30.0 * lookup(&tertiary, t - 3)
                + noise.sample(&mut rng);
            (t, Some(v))
        })
        .collect();

    let mut b = PanelBuilder::default();
    for r in dataset.regions() {
        for ind in dataset.indicators() {
            if let Some(s) = dataset.series(r, &ind.code) {
                b.insert(r, ind.clone(), s.clone())?;
            }
        }
    }
    b.insert(
        region,
        IndicatorCode::outcome(code),
        AnnualSeries::from_observations(obs)?,
    )?;
    b.finish()
}

fn zscores(s: &AnnualSeries) -> (AnnualSeries, f64, f64) {
    let vals: Vec<f64> = s.observed().map(|(_, v)| v).collect();
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let sd = if var > 0.0 { var.sqrt() } else { 1.0 };
    (s.clone(), mean, sd)
}
