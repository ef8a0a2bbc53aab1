//! Least squares by Householder QR.

use crate::error::{Error, Result};

/// Dense column-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Builds a matrix from its columns, which must share one length.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::domain("columns differ in length"));
        }
        Ok(Matrix {
            rows,
            cols: columns.len(),
            data: columns.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[c * self.rows + r]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[c * self.rows + r] = v;
    }

    fn column(&self, c: usize) -> &[f64] {
        &self.data[c * self.rows..(c + 1) * self.rows]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    /// Residual sum of squares.
    pub rss: f64,
}

/// A column whose Householder pivot falls below this fraction of its own
/// norm is treated as linearly dependent on the columns before it.
const RANK_TOLERANCE: f64 = 1e-10;

/// Minimizes ‖design · β − response‖² without forming the normal equations.
pub fn ols_rss(design: &Matrix, response: &[f64]) -> Result<OlsFit> {
    let (m, p) = (design.rows, design.cols);
    if response.len() != m {
        return Err(Error::domain(format!(
            "response has {} rows, design has {m}",
            response.len()
        )));
    }
    if m <= p {
        return Err(Error::InsufficientData {
            actual: m,
            required: p + 1,
        });
    }
    let norms: Vec<f64> = (0..p).map(|c| norm(design.column(c))).collect();
    let mut a = design.clone();
    let mut b = response.to_vec();
    let mut deficient = 0;

    for k in 0..p {
        let alpha = {
            let col = &a.data[k * m + k..(k + 1) * m];
            let nrm = norm(col);
            if col[0] > 0.0 {
                -nrm
            } else {
                nrm
            }
        };
        if alpha.abs() <= RANK_TOLERANCE * norms[k] || norms[k] == 0.0 {
            deficient += 1;
            continue;
        }
        // v = x - alpha e1, stored in place of column k
        let mut v: Vec<f64> = a.data[k * m + k..(k + 1) * m].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            for c in k..p {
                let col = &mut a.data[c * m + k..(c + 1) * m];
                let s = 2.0 * dot(&v, col) / vnorm2;
                col.iter_mut().zip(&v).for_each(|(x, vi)| *x -= s * vi);
            }
            let s = 2.0 * dot(&v, &b[k..]) / vnorm2;
            b[k..].iter_mut().zip(&v).for_each(|(x, vi)| *x -= s * vi);
        }
    }
    if deficient > 0 {
        return Err(Error::SingularDesign {
            rank: p - deficient,
            columns: p,
        });
    }

    let mut coefficients = vec![0.0; p];
    for i in (0..p).rev() {
        let mut s = b[i];
        for j in i + 1..p {
            s -= a.get(i, j) * coefficients[j];
        }
        coefficients[i] = s / a.get(i, i);
    }
    let rss = b[p..].iter().map(|x| x * x).sum();
    Ok(OlsFit { coefficients, rss })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(v: &[f64]) -> f64 {
    // scaled to avoid overflow on large magnitudes
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale * v.iter().map(|x| (x / scale).powi(2)).sum::<f64>().sqrt()
}
