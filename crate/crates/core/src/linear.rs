//! Pearson correlation with a two-sided t-test.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::panel::AlignedPair;

pub use crate::special::t_sf;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PearsonResult {
    pub r: f64,
    pub n: usize,
    pub p_value: f64,
}

/// Sample correlation of the pair, computed with centred (two-pass) sums.
pub fn pearson(pair: &AlignedPair) -> Result<PearsonResult> {
    let (x, y) = (pair.x(), pair.y());
    let n = pair.n();
    if n < 3 {
        return Err(Error::InsufficientData {
            actual: n,
            required: 3,
        });
    }
    let r = correlation(x, y)?;
    let p_value = if r.abs() == 1.0 {
        0.0
    } else {
        let dof = (n - 2) as f64;
        let t = r * (dof / (1.0 - r * r)).sqrt();
        (2.0 * t_sf(t.abs(), dof)?).min(1.0)
    };
    Ok(PearsonResult { r, n, p_value })
}

fn correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    if is_constant(x) || is_constant(y) {
        return Err(Error::Degenerate("zero variance".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate("zero variance".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

fn is_constant(v: &[f64]) -> bool {
    v.iter().all(|&a| a == v[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(x: &[f64], y: &[f64]) -> AlignedPair {
        AlignedPair::from_slices(x, y).unwrap()
    }

    #[test]
    fn exact_linearity() {
        let up = pearson(&pair(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0])).unwrap();
        assert_eq!(up.r, 1.0);
        assert_eq!(up.p_value, 0.0);
        assert_eq!(up.n, 3);
        let down = pearson(&pair(&[1.0, 2.0, 3.0], &[6.0, 4.0, 2.0])).unwrap();
        assert_eq!(down.r, -1.0);
    }

    #[test]
    fn degenerate_and_short() {
        assert!(matches!(
            pearson(&pair(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0])),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            pearson(&pair(&[0.1; 4], &[1.0, 2.0, 3.0, 4.0])),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            pearson(&pair(&[1.0, 2.0], &[1.0, 2.0])),
            Err(Error::InsufficientData {
                actual: 2,
                required: 3
            })
        ));
    }

    #[test]
    fn p_value_matches_t_test() {
        // r = 0.5 at n = 6: t = 0.5 * sqrt(4 / 0.75)
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let y = [2.0, 1.0, 4.0, 3.0, 7.0, 2.5];
        let res = pearson(&pair(&x, &y)).unwrap();
        let t = res.r * (4.0 / (1.0 - res.r * res.r)).sqrt();
        let expected = 2.0 * t_sf(t.abs(), 4.0).unwrap();
        assert!((res.p_value - expected).abs() < 1e-15);
        assert!(res.p_value > 0.0 && res.p_value < 1.0);
    }
}
