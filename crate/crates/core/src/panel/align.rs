use serde::{Deserialize, Serialize};

use super::AnnualSeries;
use crate::error::{Error, Result};

/// Fewest common years a pairwise analysis will accept by default.
pub const DEFAULT_MIN_OVERLAP: usize = 10;

/// Two gap-free sequences observed over the same strictly increasing years.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignedPair {
    years: Vec<i32>,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl AlignedPair {
    pub fn new(years: Vec<i32>, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if years.len() != x.len() || x.len() != y.len() {
            return Err(Error::domain(format!(
                "length mismatch: {} years, {} x, {} y",
                years.len(),
                x.len(),
                y.len()
            )));
        }
        if years.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("years must be strictly increasing"));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::domain("non-finite value in pair"));
        }
        Ok(AlignedPair { years, x, y })
    }

    /// Pair over consecutive pseudo-years 0, 1, 2, ...
    pub fn from_slices(x: &[f64], y: &[f64]) -> Result<Self> {
        Self::new((0..x.len() as i32).collect(), x.to_vec(), y.to_vec())
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn years(&self) -> &[i32] {
        &self.years
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// The same observations with the roles of x and y exchanged.
    pub fn swapped(&self) -> AlignedPair {
        AlignedPair {
            years: self.years.clone(),
            x: self.y.clone(),
            y: self.x.clone(),
        }
    }

    /// First year after which the next observed year is not consecutive.
    pub fn first_gap(&self) -> Option<i32> {
        self.years
            .windows(2)
            .find(|w| w[1] != w[0] + 1)
            .map(|w| w[0])
    }
}

/// Pairwise deletion: keeps exactly the years where both series carry a
/// value, in year order.
pub fn align_pair(a: &AnnualSeries, b: &AnnualSeries, min_overlap: usize) -> Result<AlignedPair> {
    if min_overlap < 3 {
        return Err(Error::domain(format!(
            "min_overlap must be at least 3, got {min_overlap}"
        )));
    }
    let lo = a.first_year().max(b.first_year());
    let hi = a.last_year().min(b.last_year());
    let mut years = Vec::new();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for year in lo..=hi {
        if let (Some(va), Some(vb)) = (a.value_at(year), b.value_at(year)) {
            years.push(year);
            x.push(va);
            y.push(vb);
        }
    }
    if years.len() < min_overlap {
        return Err(Error::InsufficientOverlap {
            actual: years.len(),
            required: min_overlap,
        });
    }
    Ok(AlignedPair { years, x, y })
}
