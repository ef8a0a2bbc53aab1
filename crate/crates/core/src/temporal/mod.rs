//! Granger causality: nested autoregressions compared by an F test, and a
//! sweep over lag orders.
//!
//! For lag `p` the restricted model regresses `y_t` on an intercept and
//! `y_{t-1} … y_{t-p}`; the unrestricted model adds `x_{t-1} … x_{t-p}`.
//! With `n_eff = n − p` usable rows,
//!
//! ```text
//! F = ((RSS_r − RSS_ur) / p) / (RSS_ur / (n_eff − 1 − 2p))
//! ```
//!
//! is referred to F(p, n_eff − 1 − 2p). The direction tested is always
//! "x Granger-causes y"; swap the pair to test the other way.

mod ols;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::panel::AlignedPair;

pub use crate::special::f_sf;
pub use ols::{ols_rss, Matrix, OlsFit};

/// Default upper end of a lag sweep.
pub const DEFAULT_MAX_LAG: usize = 5;

pub fn first_difference(series: &[f64]) -> Result<Vec<f64>> {
    if series.len() < 2 {
        return Err(Error::InsufficientData {
            actual: series.len(),
            required: 2,
        });
    }
    Ok(series.windows(2).map(|w| w[1] - w[0]).collect())
}

/// Differences both sequences of a contiguous pair; the result is labelled
/// by the later year of each difference.
pub fn difference_pair(pair: &AlignedPair) -> Result<AlignedPair> {
    if let Some(after) = pair.first_gap() {
        return Err(Error::NonContiguous { after });
    }
    AlignedPair::new(
        pair.years()[1.min(pair.n())..].to_vec(),
        first_difference(pair.x())?,
        first_difference(pair.y())?,
    )
}

/// Regression design for one lag order.
#[derive(Debug, Clone, PartialEq)]
pub struct LagDesign {
    pub response: Vec<f64>,
    pub restricted: Matrix,
    pub unrestricted: Matrix,
    pub lag: usize,
    pub n_eff: usize,
}

impl LagDesign {
    pub fn build(pair: &AlignedPair, lag: usize) -> Result<LagDesign> {
        if lag < 1 {
            return Err(Error::domain("lag must be at least 1"));
        }
        if let Some(after) = pair.first_gap() {
            return Err(Error::NonContiguous { after });
        }
        let n = pair.n();
        let required = 3 * lag + 2;
        if n < required {
            return Err(Error::InsufficientData {
                actual: n,
                required,
            });
        }
        let n_eff = n - lag;
        let (x, y) = (pair.x(), pair.y());
        let lagged = |v: &[f64], k: usize| -> Vec<f64> { (lag..n).map(|t| v[t - k]).collect() };

        let mut columns = vec![vec![1.0; n_eff]];
        columns.extend((1..=lag).map(|k| lagged(y, k)));
        let restricted = Matrix::from_columns(&columns)?;
        columns.extend((1..=lag).map(|k| lagged(x, k)));
        let unrestricted = Matrix::from_columns(&columns)?;

        Ok(LagDesign {
            response: y[lag..].to_vec(),
            restricted,
            unrestricted,
            lag,
            n_eff,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrangerResult {
    pub lag: usize,
    /// `+inf` when the unrestricted model fits exactly.
    #[serde(with = "crate::serde_float")]
    pub f_stat: f64,
    pub p_value: f64,
    pub rss_restricted: f64,
    pub rss_unrestricted: f64,
    pub n_eff: usize,
}

/// Tests whether lags of `pair.x()` help predict `pair.y()`.
pub fn granger_test(pair: &AlignedPair, lag: usize) -> Result<GrangerResult> {
    let design = LagDesign::build(pair, lag)?;
    let restricted = ols_rss(&design.restricted, &design.response)?;
    let unrestricted = ols_rss(&design.unrestricted, &design.response)?;
    let rss_r = restricted.rss;
    // the unrestricted model nests the restricted one
    let rss_ur = unrestricted.rss.min(rss_r);
    let df_den = design.n_eff - 1 - 2 * lag;

    let mean = design.response.iter().sum::<f64>() / design.n_eff as f64;
    let tss: f64 = design.response.iter().map(|v| (v - mean).powi(2)).sum();
    let (f_stat, p_value) = if rss_ur <= 1e-24 * tss.max(f64::MIN_POSITIVE) {
        (f64::INFINITY, 0.0)
    } else {
        let f = (((rss_r - rss_ur) / lag as f64) / (rss_ur / df_den as f64)).max(0.0);
        (f, f_sf(f, lag as f64, df_den as f64)?)
    };
    Ok(GrangerResult {
        lag,
        f_stat,
        p_value,
        rss_restricted: rss_r,
        rss_unrestricted: rss_ur,
        n_eff: design.n_eff,
    })
}

/// Results for lags `1..=max_lag`. Lags that cannot be fitted are listed in
/// `skipped` with the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct LagSweep {
    pub results: Vec<GrangerResult>,
    pub skipped: Vec<(usize, Error)>,
}

impl LagSweep {
    /// Lag with the smallest p-value; the smaller lag wins a tie.
    pub fn best(&self) -> Option<&GrangerResult> {
        let mut best: Option<&GrangerResult> = None;
        for r in &self.results {
            if best.map_or(true, |b| r.p_value < b.p_value) {
                best = Some(r);
            }
        }
        best
    }
}

pub fn lag_sweep(pair: &AlignedPair, max_lag: usize) -> Result<LagSweep> {
    if max_lag < 1 {
        return Err(Error::domain("max_lag must be at least 1"));
    }
    // lag 1 must be feasible; its error is the sweep's error
    let first = granger_test(pair, 1)?;
    let rest: Vec<(usize, Result<GrangerResult>)> = (2..=max_lag)
        .into_par_iter()
        .map(|lag| (lag, granger_test(pair, lag)))
        .collect();
    let mut sweep = LagSweep {
        results: vec![first],
        skipped: Vec::new(),
    };
    for (lag, r) in rest {
        match r {
            Ok(g) => sweep.results.push(g),
            Err(e) => sweep.skipped.push((lag, e)),
        }
    }
    Ok(sweep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn differences() {
        assert_eq!(first_difference(&[1.0, 3.0, 6.0]).unwrap(), [2.0, 3.0]);
        assert_eq!(first_difference(&[4.0; 5]).unwrap(), [0.0; 4]);
        assert!(matches!(
            first_difference(&[1.0]),
            Err(Error::InsufficientData {
                actual: 1,
                required: 2
            })
        ));
    }

    #[test]
    fn difference_pair_relabels_years() {
        let p = AlignedPair::new(
            vec![2000, 2001, 2002],
            vec![1.0, 2.0, 4.0],
            vec![0.0, 0.0, 1.0],
        )
        .unwrap();
        let d = difference_pair(&p).unwrap();
        assert_eq!(d.years(), &[2001, 2002]);
        assert_eq!(d.x(), &[1.0, 2.0]);
        let gap = AlignedPair::new(vec![2000, 2002, 2003], vec![1.0; 3], vec![1.0; 3]).unwrap();
        assert_eq!(
            difference_pair(&gap),
            Err(Error::NonContiguous { after: 2000 })
        );
    }

    #[test]
    fn design_shapes() {
        let v: Vec<f64> = (0..12).map(|i| (i as f64).sin()).collect();
        let p = AlignedPair::from_slices(&v, &v).unwrap();
        let d = LagDesign::build(&p, 2).unwrap();
        assert_eq!(d.n_eff, 10);
        assert_eq!(d.restricted.cols(), 3);
        assert_eq!(d.unrestricted.cols(), 5);
        assert_eq!(d.response.len(), 10);
        // first response row is y[2]; its first x lag is x[1]
        assert_eq!(d.unrestricted.get(0, 3), v[1]);
        assert_eq!(d.unrestricted.get(0, 4), v[0]);
        assert!(matches!(
            LagDesign::build(&p, 4),
            Err(Error::InsufficientData {
                actual: 12,
                required: 14
            })
        ));
    }

    #[test]
    fn gaps_are_rejected() {
        let years: Vec<i32> = (0..30).map(|i| if i < 10 { i } else { i + 1 }).collect();
        let v: Vec<f64> = (0..30).map(|i| (i as f64 * 0.7).cos()).collect();
        let p = AlignedPair::new(years, v.clone(), v).unwrap();
        assert_eq!(granger_test(&p, 1), Err(Error::NonContiguous { after: 9 }));
    }

    #[test]
    fn partial_sweep_skips_trailing_lags() {
        let x: Vec<f64> = (0..15).map(|i| ((i * 7919) % 101) as f64).collect();
        let y: Vec<f64> = (0..15).map(|i| ((i * 613) % 89) as f64).collect();
        let p = AlignedPair::from_slices(&x, &y).unwrap();
        let sweep = lag_sweep(&p, 6).unwrap();
        // n = 15 supports lags with 3p + 2 <= 15
        assert_eq!(
            sweep.results.iter().map(|r| r.lag).collect::<Vec<_>>(),
            [1, 2, 3, 4]
        );
        assert_eq!(
            sweep.skipped.iter().map(|s| s.0).collect::<Vec<_>>(),
            [5, 6]
        );
        assert!(sweep.best().is_some());

        // a pure sinusoid obeys a two-term recurrence, so lag 3 is collinear
        let s: Vec<f64> = (0..15).map(|i| (i as f64 * 0.4).cos()).collect();
        let p = AlignedPair::from_slices(&x, &s).unwrap();
        let sweep = lag_sweep(&p, 3).unwrap();
        assert!(matches!(
            sweep.skipped[0],
            (3, Error::SingularDesign { .. })
        ));

        let short = AlignedPair::from_slices(&x[..4], &y[..4]).unwrap();
        assert!(matches!(
            lag_sweep(&short, 3),
            Err(Error::InsufficientData { .. })
        ));
        assert!(lag_sweep(&p, 0).is_err());
    }

    #[test]
    fn best_lag_tie_prefers_smaller() {
        let mk = |lag, p_value| GrangerResult {
            lag,
            f_stat: 1.0,
            p_value,
            rss_restricted: 1.0,
            rss_unrestricted: 1.0,
            n_eff: 10,
        };
        let sweep = LagSweep {
            results: vec![mk(1, 0.3), mk(2, 0.0), mk(3, 0.0)],
            skipped: vec![],
        };
        assert_eq!(sweep.best().unwrap().lag, 2);
    }
}
