//! Reference implementations used as test oracles. None of this shares code
//! with the library beyond its public types.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub const FIXTURE_PEARSON: &str = include_str!("../data/fixture_pearson_oracle.csv");
pub const TAIL_ORACLE: &str = include_str!("../data/tail_oracle.csv");

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

// ---------------------------------------------------------------------------
// double-double arithmetic

#[derive(Debug, Clone, Copy)]
pub struct Dd(f64, f64);

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd(s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd(s, b - (s - a))
}

impl Dd {
    pub fn from(a: f64) -> Dd {
        Dd(a, 0.0)
    }

    pub fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.0, o.0);
        let t = two_sum(self.1, o.1);
        let v = quick_two_sum(s.0, s.1 + t.0);
        quick_two_sum(v.0, v.1 + t.1)
    }

    pub fn neg(self) -> Dd {
        Dd(-self.0, -self.1)
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Dd) -> Dd {
        let p = self.0 * o.0;
        let e = self.0.mul_add(o.0, -p);
        quick_two_sum(p, e + (self.0 * o.1 + self.1 * o.0))
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.0 / o.0;
        let r = self.sub(o.mul(Dd::from(q1)));
        let q2 = r.0 / o.0;
        let r = r.sub(o.mul(Dd::from(q2)));
        let q3 = r.0 / o.0;
        quick_two_sum(q1, q2).add(Dd::from(q3))
    }

    pub fn sqrt(self) -> Dd {
        if self.0 <= 0.0 {
            return Dd(0.0, 0.0);
        }
        let x = self.0.sqrt();
        // one Newton step in double-double
        let xd = Dd::from(x);
        xd.add(self.sub(xd.mul(xd)).div(Dd::from(2.0 * x)))
    }

    pub fn to_f64(self) -> f64 {
        self.0 + self.1
    }
}

/// Correlation from its definition, Σ(x−x̄)(y−ȳ) / √(Σ(x−x̄)² Σ(y−ȳ)²),
/// every term carried in double-double.
pub fn pearson_oracle(x: &[f64], y: &[f64]) -> f64 {
    let n = Dd::from(x.len() as f64);
    let mean = |v: &[f64]| {
        v.iter()
            .fold(Dd::from(0.0), |acc, &a| acc.add(Dd::from(a)))
            .div(n)
    };
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (Dd::from(0.0), Dd::from(0.0), Dd::from(0.0));
    for (&a, &b) in x.iter().zip(y) {
        let dx = Dd::from(a).sub(mx);
        let dy = Dd::from(b).sub(my);
        sxy = sxy.add(dx.mul(dy));
        sxx = sxx.add(dx.mul(dx));
        syy = syy.add(dy.mul(dy));
    }
    sxy.div(sxx.mul(syy).sqrt()).to_f64()
}

// ---------------------------------------------------------------------------
// frozen oracle tables

pub struct PearsonRow {
    pub a: String,
    pub b: String,
    pub n: usize,
    pub r: f64,
}

pub fn fixture_pearson_rows() -> Vec<PearsonRow> {
    FIXTURE_PEARSON
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            PearsonRow {
                a: f[0].into(),
                b: f[1].into(),
                n: f[2].parse().unwrap(),
                r: f[3].parse().unwrap(),
            }
        })
        .collect()
}

pub struct TailRow {
    pub kind: String,
    pub stat: f64,
    pub d1: f64,
    pub d2: f64,
    pub sf: f64,
}

pub fn tail_rows() -> Vec<TailRow> {
    TAIL_ORACLE
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            TailRow {
                kind: f[0].into(),
                stat: f[1].parse().unwrap(),
                d1: f[2].parse().unwrap(),
                d2: f[3].parse().unwrap(),
                sf: f[4].parse().unwrap(),
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// MIC by exhaustive enumeration

/// Row of each point when `values` (all distinct) are cut into `rows`
/// consecutive groups, each new group opened when adding the next point
/// would move the current group further from its target size
/// `remaining / rows_left`.
pub fn equipartition_distinct(values: &[f64], rows: usize) -> Vec<usize> {
    let n = values.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut out = vec![0; n];
    let mut row = 0;
    let mut size = 0.0;
    let mut target = n as f64 / rows as f64;
    for (k, &i) in idx.iter().enumerate() {
        if size > 0.0 && (size + 1.0 - target).abs() >= (size - target).abs() && row + 1 < rows {
            row += 1;
            size = 0.0;
            target = (n - k) as f64 / (rows - row) as f64;
        }
        out[i] = row;
        size += 1.0;
    }
    out
}

fn mi_of_labels(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len() as f64;
    let ka = a.iter().max().unwrap() + 1;
    let kb = b.iter().max().unwrap() + 1;
    let mut joint = vec![0.0; ka * kb];
    let mut pa = vec![0.0; ka];
    let mut pb = vec![0.0; kb];
    for (&i, &j) in a.iter().zip(b) {
        joint[i * kb + j] += 1.0;
        pa[i] += 1.0;
        pb[j] += 1.0;
    }
    let mut mi = 0.0;
    for i in 0..ka {
        for j in 0..kb {
            let c = joint[i * kb + j];
            if c > 0.0 {
                mi += c / n * (c * n / (pa[i] * pb[j])).log2();
            }
        }
    }
    mi
}

/// Largest I over every partition of `opt` into at most `max_parts`
/// intervals, against the fixed labels.
fn best_over_partitions(opt: &[f64], fixed: &[usize], max_parts: usize) -> f64 {
    let n = opt.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| opt[a].partial_cmp(&opt[b]).unwrap());
    let mut best = 0.0f64;
    let mut cuts: Vec<usize> = Vec::new();
    // enumerate increasing cut sequences (cut k means a boundary after sorted position k)
    fn rec(
        start: usize,
        n: usize,
        left: usize,
        cuts: &mut Vec<usize>,
        idx: &[usize],
        fixed: &[usize],
        best: &mut f64,
    ) {
        let mut labels = vec![0; n];
        let mut part = 0;
        let mut c = 0;
        for (pos, &i) in idx.iter().enumerate() {
            labels[i] = part;
            if c < cuts.len() && cuts[c] == pos {
                part += 1;
                c += 1;
            }
        }
        let mi = mi_of_labels(&labels, fixed);
        if mi > *best {
            *best = mi;
        }
        if left == 0 {
            return;
        }
        for k in start..n - 1 {
            cuts.push(k);
            rec(k + 1, n, left - 1, cuts, idx, fixed, best);
            cuts.pop();
        }
    }
    rec(0, n, max_parts - 1, &mut cuts, &idx, fixed, &mut best);
    best
}

/// Characteristic matrix entry `(b1, b2)` (b1 columns on x, b2 rows on y)
/// with `log2(min(b1, b2))` normalization, both orientations.
pub fn brute_entry(x: &[f64], y: &[f64], b1: usize, b2: usize) -> f64 {
    let rows = equipartition_distinct(y, b2);
    let a = best_over_partitions(x, &rows, b1);
    let cols = equipartition_distinct(x, b1);
    let b = best_over_partitions(y, &cols, b2);
    a.max(b) / (b1.min(b2) as f64).log2()
}

/// MIC over all `b1 · b2 <= bound`.
pub fn brute_mic(x: &[f64], y: &[f64], bound: usize) -> (f64, Vec<(usize, usize, f64)>) {
    let mut entries = Vec::new();
    let mut best = 0.0f64;
    for b1 in 2..=bound / 2 {
        for b2 in 2..=bound / b1 {
            let s = brute_entry(x, y, b1, b2);
            best = best.max(s);
            entries.push((b1, b2, s));
        }
    }
    (best, entries)
}

pub fn shuffled(rng: &mut ChaCha8Rng, v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    out.shuffle(rng);
    out
}

// ---------------------------------------------------------------------------
// time-series generators

/// `y_t = 0.8 y_{t-1} + 0.5 x_{t-2} + ε_t` with white-noise `x`, after a
/// burn-in of 50 steps. Returns `(x, y)`.
pub fn lag2_system(seed: u64, n: usize, noise_sd: f64) -> (Vec<f64>, Vec<f64>) {
    let mut r = rng(seed);
    let burn = 50;
    let total = n + burn;
    let x = normals(&mut r, total);
    let mut y = vec![0.0; total];
    for t in 2..total {
        let e: f64 = r.sample::<f64, _>(StandardNormal) * noise_sd;
        y[t] = 0.8 * y[t - 1] + 0.5 * x[t - 2] + e;
    }
    (x[burn..].to_vec(), y[burn..].to_vec())
}
