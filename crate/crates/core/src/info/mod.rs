//! Discretization, entropy, mutual information and the maximal information
//! coefficient. All logarithms are base 2, so every quantity is in bits.

mod mic;

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};
use crate::panel::AlignedPair;

pub use mic::{
    characteristic_matrix, grid_bound, mic, CharacteristicMatrix, MicNormalization, MicParams,
    MicResult,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BinningStrategy {
    EqualWidth,
    EqualFrequency,
}

impl fmt::Display for BinningStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BinningStrategy::EqualWidth => "equal-width",
            BinningStrategy::EqualFrequency => "equal-frequency",
        })
    }
}

/// Assigns every value a bin label in `0..bins`.
///
/// Equal-width bins span `[min, max]` with the maximum in the top bin; a
/// constant input lands entirely in bin 0. Equal-frequency bins split the
/// stable sort order into `bins` runs of (nearly) equal length, so tied
/// values are ordered by first occurrence.
pub fn discretize(values: &[f64], bins: usize, strategy: BinningStrategy) -> Result<Vec<usize>> {
    if bins < 2 {
        return Err(Error::domain(format!("need at least 2 bins, got {bins}")));
    }
    if values.len() < bins {
        return Err(Error::InsufficientData {
            actual: values.len(),
            required: bins,
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("non-finite value"));
    }
    let n = values.len();
    match strategy {
        BinningStrategy::EqualWidth => {
            let min = values.iter().copied().fold(f64::INFINITY, f64::min);
            let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if max == min {
                return Ok(vec![0; n]);
            }
            let span = max - min;
            Ok(values
                .iter()
                .map(|&v| (((v - min) / span * bins as f64) as usize).min(bins - 1))
                .collect())
        }
        BinningStrategy::EqualFrequency => {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            let mut labels = vec![0; n];
            for (rank, &i) in order.iter().enumerate() {
                labels[i] = rank * bins / n;
            }
            Ok(labels)
        }
    }
}

/// Shannon entropy of the empirical label distribution.
pub fn entropy(labels: &[usize]) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::domain("entropy of an empty sequence"));
    }
    let size = labels.iter().max().map_or(0, |m| m + 1);
    let mut counts = vec![0u64; size];
    for &l in labels {
        counts[l] += 1;
    }
    Ok(entropy_of_counts(&counts, labels.len() as u64))
}

pub(crate) fn entropy_of_counts(counts: &[u64], n: u64) -> f64 {
    let n = n as f64;
    let h: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum();
    h.max(0.0)
}

/// Contingency table of two label sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointHistogram {
    counts: Vec<Vec<u64>>,
    n: u64,
}

impl JointHistogram {
    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self> {
        let cols = counts.first().map_or(0, Vec::len);
        if cols == 0 || counts.iter().any(|r| r.len() != cols) {
            return Err(Error::domain(
                "joint histogram must be a non-empty rectangular grid",
            ));
        }
        let n = counts.iter().flatten().sum();
        if n == 0 {
            return Err(Error::domain("joint histogram is empty"));
        }
        Ok(JointHistogram { counts, n })
    }

    pub fn from_labels(x: &[usize], y: &[usize], bins_x: usize, bins_y: usize) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::domain("label sequences differ in length"));
        }
        let mut counts = vec![vec![0u64; bins_y]; bins_x];
        for (&a, &b) in x.iter().zip(y) {
            if a >= bins_x || b >= bins_y {
                return Err(Error::domain(format!(
                    "label ({a}, {b}) outside {bins_x}x{bins_y} grid"
                )));
            }
            counts[a][b] += 1;
        }
        Self::from_counts(counts)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    /// Σ p(x,y) log2(p(x,y) / (p(x) p(y))) over non-empty cells, floored at 0.
    pub fn mutual_information(&self) -> f64 {
        let n = self.n as f64;
        let rows: Vec<u64> = self.counts.iter().map(|r| r.iter().sum()).collect();
        let cols: Vec<u64> = (0..self.counts[0].len())
            .map(|j| self.counts.iter().map(|r| r[j]).sum())
            .collect();
        let mut mi = 0.0;
        for (i, row) in self.counts.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let c = c as f64;
                mi += c / n * (c * n / (rows[i] as f64 * cols[j] as f64)).log2();
            }
        }
        mi.max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MutualInfoResult {
    pub mi: f64,
    pub bins_x: usize,
    pub bins_y: usize,
    pub strategy: BinningStrategy,
}

/// Default bin count for `n` observations: `min(floor(sqrt(n)), 10)`.
pub fn default_bins(n: usize) -> usize {
    ((n as f64).sqrt().floor() as usize).min(10)
}

/// Histogram estimate of I(X; Y) with the same binning on both axes.
pub fn mutual_information(
    pair: &AlignedPair,
    bins: usize,
    strategy: BinningStrategy,
) -> Result<MutualInfoResult> {
    let required = bins.max(4);
    if pair.n() < required {
        return Err(Error::InsufficientData {
            actual: pair.n(),
            required,
        });
    }
    let lx = discretize(pair.x(), bins, strategy)?;
    let ly = discretize(pair.y(), bins, strategy)?;
    let hist = JointHistogram::from_labels(&lx, &ly, bins, bins)?;
    Ok(MutualInfoResult {
        mi: hist.mutual_information(),
        bins_x: bins,
        bins_y: bins,
        strategy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discretize_examples() {
        use BinningStrategy::*;
        assert_eq!(
            discretize(&[1.0, 2.0, 3.0, 4.0], 2, EqualFrequency).unwrap(),
            [0, 0, 1, 1]
        );
        assert_eq!(
            discretize(&[0.0, 0.1, 0.2, 10.0], 2, EqualWidth).unwrap(),
            [0, 0, 0, 1]
        );
        assert_eq!(discretize(&[5.0; 4], 2, EqualWidth).unwrap(), [0, 0, 0, 0]);
        assert_eq!(
            discretize(&[4.0, 1.0, 3.0, 2.0], 2, EqualFrequency).unwrap(),
            [1, 0, 1, 0]
        );
        // ties follow first occurrence
        assert_eq!(
            discretize(&[7.0, 7.0, 7.0, 7.0], 2, EqualFrequency).unwrap(),
            [0, 0, 1, 1]
        );
        assert!(matches!(
            discretize(&[1.0, 2.0], 1, EqualWidth),
            Err(Error::Domain(_))
        ));
        assert!(discretize(&[1.0, 2.0], 3, EqualWidth).is_err());
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&[0, 0, 1, 1]).unwrap(), 1.0);
        assert_eq!(entropy(&[0, 0, 0, 0]).unwrap(), 0.0);
        assert_eq!(entropy(&[0, 1, 2, 3]).unwrap(), 2.0);
        assert!(entropy(&[]).is_err());
    }

    #[test]
    fn closed_form_joints() {
        let indep = JointHistogram::from_counts(vec![vec![25, 25], vec![25, 25]]).unwrap();
        assert_eq!(indep.mutual_information(), 0.0);
        let diag = JointHistogram::from_counts(vec![vec![50, 0], vec![0, 50]]).unwrap();
        assert_eq!(diag.mutual_information(), 1.0);
        assert!(JointHistogram::from_counts(vec![vec![1, 2], vec![3]]).is_err());
        assert!(JointHistogram::from_counts(vec![vec![0, 0]]).is_err());
    }

    #[test]
    fn identical_series_give_label_entropy() {
        let x: Vec<f64> = (0..100).map(|i| ((i * 37) % 100) as f64).collect();
        let pair = AlignedPair::from_slices(&x, &x).unwrap();
        let res = mutual_information(&pair, 4, BinningStrategy::EqualFrequency).unwrap();
        assert_eq!(res.mi, 2.0);
        assert_eq!((res.bins_x, res.bins_y), (4, 4));
    }

    #[test]
    fn default_bin_rule() {
        assert_eq!(default_bins(33), 5);
        assert_eq!(default_bins(4), 2);
        assert_eq!(default_bins(10_000), 10);
    }
}
