//! Maximal information coefficient.
//!
//! For every grid resolution `(b1, b2)` with `b1·b2 ≤ B(n) = ⌈n^α⌉` the
//! characteristic matrix holds the largest normalized mutual information
//! reachable by a `b1 × b2` grid. Each entry is approximated the usual way:
//! one axis is equipartitioned, and the other axis is optimized exactly by
//! dynamic programming over clump boundaries. Both orientations are
//! computed and the larger value kept. The MIC is the matrix maximum.
//!
//! The optimized axis only ever needs boundaries between runs of points that
//! share a row of the fixed axis ("clumps"): within such a run the
//! conditional entropy is concave in the boundary position, so the optimum
//! sits at a run end. When there are more clumps than `clumps · b`, adjacent
//! clumps are merged into that many superclumps of near-equal size.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::panel::AlignedPair;

/// Smallest sample the search accepts.
pub const MIC_MIN_N: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MicNormalization {
    /// Divide each matrix entry by `log2(min(b1, b2))`.
    #[serde(rename = "min-entropy-grid")]
    MinGrid,
    /// Divide by `max(H(X), H(Y))` of the grid that attains the entry.
    #[serde(rename = "max-entropy")]
    MaxEntropy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MicParams {
    pub alpha: f64,
    pub clumps: f64,
    pub normalization: MicNormalization,
}

impl Default for MicParams {
    fn default() -> Self {
        MicParams {
            alpha: 0.6,
            clumps: 15.0,
            normalization: MicNormalization::MinGrid,
        }
    }
}

impl MicParams {
    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::domain(format!(
                "alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        if !(self.clumps >= 1.0) || !self.clumps.is_finite() {
            return Err(Error::domain(format!(
                "clumps must be >= 1, got {}",
                self.clumps
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MicResult {
    pub mic: f64,
    /// Columns (x-axis bins) of the maximizing resolution.
    pub best_b1: usize,
    /// Rows (y-axis bins) of the maximizing resolution.
    pub best_b2: usize,
    pub grid_bound: usize,
    pub normalization: MicNormalization,
    /// Set when one axis is constant; `mic` is then 0.
    pub degenerate: bool,
}

/// `⌈n^α⌉`.
pub fn grid_bound(n: usize, alpha: f64) -> usize {
    // absorb rounding noise when n^alpha is integral
    ((n as f64).powf(alpha) - 1e-9).ceil().max(0.0) as usize
}

/// One entry of the characteristic matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixEntry {
    pub b1: usize,
    pub b2: usize,
    /// Normalized score in `[0, 1]`.
    pub score: f64,
    /// Unnormalized mutual information (bits) of the grid attaining `score`.
    pub mi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicMatrix {
    pub grid_bound: usize,
    /// Entries in lexicographic `(b1, b2)` order.
    pub entries: Vec<MatrixEntry>,
}

impl CharacteristicMatrix {
    pub fn get(&self, b1: usize, b2: usize) -> Option<&MatrixEntry> {
        self.entries.iter().find(|e| e.b1 == b1 && e.b2 == b2)
    }

    /// Maximum entry; ties go to the lexicographically smallest `(b1, b2)`.
    pub fn best(&self) -> Option<&MatrixEntry> {
        let mut best: Option<&MatrixEntry> = None;
        for e in &self.entries {
            if best.map_or(true, |b| e.score > b.score) {
                best = Some(e);
            }
        }
        best
    }
}

pub fn mic(pair: &AlignedPair, params: &MicParams) -> Result<MicResult> {
    params.validate()?;
    let n = pair.n();
    if n < MIC_MIN_N {
        return Err(Error::InsufficientData {
            actual: n,
            required: MIC_MIN_N,
        });
    }
    let bound = grid_bound(n, params.alpha);
    let constant = |v: &[f64]| v.iter().all(|&a| a == v[0]);
    if constant(pair.x()) || constant(pair.y()) || bound < 4 {
        return Ok(MicResult {
            mic: 0.0,
            best_b1: 2,
            best_b2: 2,
            grid_bound: bound,
            normalization: params.normalization,
            degenerate: true,
        });
    }
    let matrix = characteristic_matrix(pair.x(), pair.y(), params)?;
    let best = matrix.best().expect("bound >= 4 yields a 2x2 entry");
    Ok(MicResult {
        mic: best.score.clamp(0.0, 1.0),
        best_b1: best.b1,
        best_b2: best.b2,
        grid_bound: bound,
        normalization: params.normalization,
        degenerate: false,
    })
}

/// Full characteristic matrix of `(x, y)`.
pub fn characteristic_matrix(
    x: &[f64],
    y: &[f64],
    params: &MicParams,
) -> Result<CharacteristicMatrix> {
    params.validate()?;
    if x.len() != y.len() {
        return Err(Error::domain("x and y differ in length"));
    }
    let n = x.len();
    let bound = grid_bound(n, params.alpha);

    // y equipartitioned into `rows`, x optimized: indexed [rows][cols]
    let by_rows: Vec<(usize, AxisScores)> = (2..=bound / 2)
        .into_par_iter()
        .map(|rows| (rows, optimize_axis(x, y, rows, bound / rows, params.clumps)))
        .collect();
    // x equipartitioned into `cols`, y optimized
    let by_cols: Vec<(usize, AxisScores)> = (2..=bound / 2)
        .into_par_iter()
        .map(|cols| (cols, optimize_axis(y, x, cols, bound / cols, params.clumps)))
        .collect();

    let normalize = |mi: f64, h_a: f64, h_b: f64, b1: usize, b2: usize| -> f64 {
        let denom = match params.normalization {
            MicNormalization::MinGrid => (b1.min(b2) as f64).log2(),
            MicNormalization::MaxEntropy => h_a.max(h_b),
        };
        if denom > 0.0 {
            (mi / denom).clamp(0.0, 1.0)
        } else {
            0.0
        }
    };

    let mut entries = Vec::new();
    for b1 in 2..=bound / 2 {
        for b2 in 2..=bound / b1 {
            let a = &by_rows[b2 - 2].1;
            let (mi_a, hp_a) = a.by_count[b1 - 2];
            let sa = normalize(mi_a, hp_a, a.h_fixed, b1, b2);
            let b = &by_cols[b1 - 2].1;
            let (mi_b, hp_b) = b.by_count[b2 - 2];
            let sb = normalize(mi_b, hp_b, b.h_fixed, b1, b2);
            let (score, mi) = if sb > sa { (sb, mi_b) } else { (sa, mi_a) };
            entries.push(MatrixEntry { b1, b2, score, mi });
        }
    }
    Ok(CharacteristicMatrix {
        grid_bound: bound,
        entries,
    })
}

struct AxisScores {
    /// Entropy of the equipartitioned axis.
    h_fixed: f64,
    /// For 2, 3, ... parts on the optimized axis: (best I, entropy of the
    /// optimized-axis partition attaining it).
    by_count: Vec<(f64, f64)>,
}

/// Equipartitions `fixed` into `rows` rows and, for every part count
/// `2..=max_parts`, maximizes I over partitions of `opt` into at most that
/// many parts.
fn optimize_axis(
    opt: &[f64],
    fixed: &[f64],
    rows: usize,
    max_parts: usize,
    clump_factor: f64,
) -> AxisScores {
    let n = opt.len();
    let logs = Log2Table::new(n);
    let (row_of, used_rows) = equipartition(fixed, rows);
    let mut row_counts = vec![0u64; used_rows];
    for &r in &row_of {
        row_counts[r] += 1;
    }
    let h_fixed = entropy_counts(&row_counts, n as u64, &logs);

    if max_parts < 2 {
        return AxisScores {
            h_fixed,
            by_count: Vec::new(),
        };
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| opt[a].total_cmp(&opt[b]));

    // Clump labels: the fixed-axis row, except that a group of tied `opt`
    // values spanning several rows gets a private label so it cannot split.
    let mut label: Vec<i64> = order.iter().map(|&i| row_of[i] as i64).collect();
    let mut private = -1i64;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && opt[order[j]] == opt[order[i]] {
            j += 1;
        }
        if j - i > 1 && label[i..j].iter().any(|&l| l != label[i]) {
            label[i..j].iter_mut().for_each(|l| *l = private);
            private -= 1;
        }
        i = j;
    }

    // clump sizes per row
    let mut clumps: Vec<Vec<u64>> = Vec::new();
    for (pos, &point) in order.iter().enumerate() {
        if pos == 0 || label[pos] != label[pos - 1] {
            clumps.push(vec![0; used_rows]);
        }
        clumps.last_mut().unwrap()[row_of[point]] += 1;
    }

    let cap = ((clump_factor * max_parts as f64).ceil() as usize).max(1);
    if clumps.len() > cap {
        let sizes: Vec<u64> = clumps.iter().map(|c| c.iter().sum()).collect();
        let (group_of, groups) = greedy_groups(&sizes, cap);
        let mut merged = vec![vec![0u64; used_rows]; groups];
        for (c, g) in clumps.iter().zip(group_of) {
            for (m, &v) in merged[g].iter_mut().zip(c) {
                *m += v;
            }
        }
        clumps = merged;
    }

    let k = clumps.len();
    // prefix[t][r]: points of row r among the first t clumps
    let mut prefix = vec![vec![0u64; used_rows]; k + 1];
    for t in 0..k {
        for r in 0..used_rows {
            prefix[t + 1][r] = prefix[t][r] + clumps[t][r];
        }
    }
    let span =
        |s: usize, t: usize| -> u64 { (0..used_rows).map(|r| prefix[t][r] - prefix[s][r]).sum() };
    // cost(s, t) = m · H(row | clumps s..t), m the number of points
    let mut cost = vec![0.0; (k + 1) * (k + 1)];
    for s in 0..k {
        for t in s + 1..=k {
            let m = span(s, t);
            let lm = logs.get(m);
            let mut c = 0.0;
            for r in 0..used_rows {
                let cr = prefix[t][r] - prefix[s][r];
                if cr > 0 {
                    c += cr as f64 * (lm - logs.get(cr));
                }
            }
            cost[s * (k + 1) + t] = c;
        }
    }
    let cost_at = |s: usize, t: usize| cost[s * (k + 1) + t];

    let parts_max = max_parts.min(k);
    // best[l][t]: minimal cost of splitting the first t clumps into exactly l parts
    let mut best = vec![vec![f64::INFINITY; k + 1]; parts_max + 1];
    let mut from = vec![vec![0usize; k + 1]; parts_max + 1];
    for t in 1..=k {
        best[1][t] = cost_at(0, t);
    }
    for l in 2..=parts_max {
        for t in l..=k {
            let mut b = f64::INFINITY;
            let mut arg = l - 1;
            for s in l - 1..t {
                let v = best[l - 1][s] + cost_at(s, t);
                if v < b {
                    b = v;
                    arg = s;
                }
            }
            best[l][t] = b;
            from[l][t] = arg;
        }
    }

    let nf = n as f64;
    let mut by_count = Vec::with_capacity(max_parts - 1);
    for parts in 2..=max_parts {
        // at most `parts` parts; fewer parts win ties
        let (mut c, mut l) = (best[1][k], 1);
        for cand in 2..=parts.min(parts_max) {
            if best[cand][k] < c {
                c = best[cand][k];
                l = cand;
            }
        }

        // rebuild the optimal partition to get its entropy
        let mut sizes = Vec::with_capacity(l);
        let mut t = k;
        for level in (1..=l).rev() {
            let s = if level == 1 { 0 } else { from[level][t] };
            sizes.push(span(s, t));
            t = s;
        }
        let h_opt = entropy_counts(&sizes, n as u64, &logs);
        let mi = (h_fixed - c / nf).max(0.0).min(h_fixed.min(h_opt));
        by_count.push((mi, h_opt));
    }
    AxisScores { h_fixed, by_count }
}

/// Rows of near-equal size over the sorted values, never splitting ties.
/// Returns the row of every point and the number of rows used.
fn equipartition(values: &[f64], rows: usize) -> (Vec<usize>, usize) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    // tie groups along the sorted order
    let mut group_sizes = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && values[order[j]] == values[order[i]] {
            j += 1;
        }
        group_sizes.push((j - i) as u64);
        i = j;
    }
    let (group_of, used) = greedy_groups(&group_sizes, rows);
    let mut row_of = vec![0; n];
    let mut pos = 0;
    for (g, &size) in group_of.iter().zip(&group_sizes) {
        for _ in 0..size {
            row_of[order[pos]] = *g;
            pos += 1;
        }
    }
    (row_of, used)
}

/// Packs consecutive items of the given sizes into at most `groups` groups
/// whose totals track `remaining / groups_left`. Returns the group of every
/// item and the number of groups used.
fn greedy_groups(sizes: &[u64], groups: usize) -> (Vec<usize>, usize) {
    let total: u64 = sizes.iter().sum();
    let mut out = Vec::with_capacity(sizes.len());
    let mut current = 0usize;
    let mut filled = 0u64;
    let mut consumed = 0u64;
    let mut desired = total as f64 / groups as f64;
    for &s in sizes {
        let with = (filled as f64 + s as f64 - desired).abs();
        let without = (filled as f64 - desired).abs();
        if filled > 0 && with >= without && current + 1 < groups {
            current += 1;
            filled = 0;
            desired = (total - consumed) as f64 / (groups - current) as f64;
        }
        out.push(current);
        filled += s;
        consumed += s;
    }
    (out, current + 1)
}

fn entropy_counts(counts: &[u64], n: u64, logs: &Log2Table) -> f64 {
    let ln = logs.get(n);
    let nf = n as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| c as f64 / nf * (ln - logs.get(c)))
        .sum::<f64>()
        .max(0.0)
}

struct Log2Table(Vec<f64>);

impl Log2Table {
    fn new(n: usize) -> Self {
        Log2Table(
            (0..=n)
                .map(|i| if i == 0 { 0.0 } else { (i as f64).log2() })
                .collect(),
        )
    }

    fn get(&self, i: u64) -> f64 {
        self.0[i as usize]
    }
}
