//! One-class detection by squared feature-space distance to the empirical
//! kernel center of mass.
//!
//! With an RBF kernel (`k(x, x) = 1`) the squared distance of a point `y` to
//! the center of mass of the `m` training points is
//!
//! ```text
//! dist2(y) = 1 - (2/m) sum_j k(y, x_j) + (1/m^2) sum_{i,j} k(x_i, x_j)
//! ```
//!
//! The detection threshold is the largest training `dist2` plus the
//! estimation error of the empirical center, `(2/sqrt(m)) (1 + sqrt(ln(1/delta)/2))`,
//! which holds with probability `1 - delta`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::sparse::SparseVector;

pub const DEFAULT_SIGMA: f64 = 1.0;
pub const DEFAULT_DELTA: f64 = 0.01;

/// `||x - z||^2` computed entry by entry.
pub fn squared_distance(x: &SparseVector, z: &SparseVector) -> f64 {
    let (xi, xv) = (x.indices(), x.values());
    let (zi, zv) = (z.indices(), z.values());
    let (mut a, mut b) = (0, 0);
    let mut acc = 0.0;
    while a < xi.len() || b < zi.len() {
        let d = if b == zi.len() || (a < xi.len() && xi[a] < zi[b]) {
            a += 1;
            xv[a - 1]
        } else if a == xi.len() || zi[b] < xi[a] {
            b += 1;
            zv[b - 1]
        } else {
            a += 1;
            b += 1;
            xv[a - 1] - zv[b - 1]
        };
        acc += d * d;
    }
    acc
}

/// Gaussian kernel `exp(-||x - z||^2 / (2 sigma^2))`.
pub fn rbf_kernel(x: &SparseVector, z: &SparseVector, sigma: f64) -> f64 {
    (-squared_distance(x, z) / (2.0 * sigma * sigma)).exp()
}

/// Deviation bound of the empirical kernel center of mass for kernels with
/// `k(x, x) <= 1`, holding with probability `1 - delta`.
pub fn estimation_error(m: usize, delta: f64) -> f64 {
    (2.0 / (m as f64).sqrt()) * (1.0 + ((1.0 / delta).ln() / 2.0).sqrt())
}

#[derive(Debug, Clone)]
pub struct SvddModel {
    train_rows: Vec<SparseVector>,
    sigma: f64,
    delta: f64,
    kernel_row_mean: Vec<f64>,
    kernel_grand_mean: f64,
    train_distances_sq: Vec<f64>,
    threshold: f64,
}

pub fn svdd_fit(train: Vec<SparseVector>, sigma: f64, delta: f64) -> Result<SvddModel> {
    if train.is_empty() {
        return Err(Error::EmptyInput("SVDD needs at least one training row"));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::config(format!("sigma must be positive, got {sigma}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::config(format!("delta must lie in (0, 1), got {delta}")));
    }
    let m = train.len();
    let mut row_sum = vec![0.0; m];
    for i in 0..m {
        row_sum[i] += 1.0;
        for j in i + 1..m {
            let k = rbf_kernel(&train[i], &train[j], sigma);
            row_sum[i] += k;
            row_sum[j] += k;
        }
    }
    let mf = m as f64;
    let kernel_row_mean: Vec<f64> = row_sum.iter().map(|s| s / mf).collect();
    let kernel_grand_mean = row_sum.iter().sum::<f64>() / (mf * mf);
    let train_distances_sq: Vec<f64> = kernel_row_mean
        .iter()
        .map(|r| 1.0 - 2.0 * r + kernel_grand_mean)
        .collect();
    let max_dist = train_distances_sq.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let threshold = max_dist + estimation_error(m, delta);
    Ok(SvddModel {
        train_rows: train,
        sigma,
        delta,
        kernel_row_mean,
        kernel_grand_mean,
        train_distances_sq,
        threshold,
    })
}

impl SvddModel {
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn kernel_grand_mean(&self) -> f64 {
        self.kernel_grand_mean
    }

    pub fn kernel_row_mean(&self) -> &[f64] {
        &self.kernel_row_mean
    }

    pub fn train_distances_sq(&self) -> &[f64] {
        &self.train_distances_sq
    }

    pub fn train_size(&self) -> usize {
        self.train_rows.len()
    }

    pub fn distance_sq(&self, y: &SparseVector) -> f64 {
        let s: f64 = self.train_rows.iter().map(|x| rbf_kernel(y, x, self.sigma)).sum();
        1.0 - 2.0 * s / self.train_rows.len() as f64 + self.kernel_grand_mean
    }

    pub fn detect(&self, test: &[SparseVector]) -> DetectionResult {
        self.collect(test.iter().map(|y| self.distance_sq(y)).collect())
    }

    /// As [`detect`](Self::detect), spreading rows over `threads` workers.
    pub fn detect_parallel(&self, test: &[SparseVector], threads: usize) -> DetectionResult {
        let threads = threads.max(1);
        let chunk = test.len().div_ceil(threads).max(1);
        let distances = std::thread::scope(|scope| {
            let handles: Vec<_> = test
                .chunks(chunk)
                .map(|part| scope.spawn(move || part.iter().map(|y| self.distance_sq(y)).collect::<Vec<_>>()))
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("detection worker panicked"))
                .collect()
        });
        self.collect(distances)
    }

    fn collect(&self, distances_sq: Vec<f64>) -> DetectionResult {
        let flagged = distances_sq
            .iter()
            .enumerate()
            .filter(|(_, d)| **d > self.threshold)
            .map(|(i, _)| i)
            .collect();
        DetectionResult { flagged, distances_sq }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DetectionResult {
    /// Indices (into the test rows) with `dist2 > threshold`.
    pub flagged: Vec<usize>,
    pub distances_sq: Vec<f64>,
}

pub const DETECTION_HEADER: &str = "row_index,distance_sq,flagged";

impl DetectionResult {
    pub fn is_flagged(&self, row: usize) -> bool {
        self.flagged.binary_search(&row).is_ok()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{DETECTION_HEADER}")?;
        let mut flagged = self.flagged.iter().peekable();
        for (i, d) in self.distances_sq.iter().enumerate() {
            let hit = flagged.next_if_eq(&&i).is_some();
            writeln!(out, "{i},{d:.12e},{}", u8::from(hit))?;
        }
        Ok(())
    }
}

/// Restricts every row to one feature, re-indexed to position 0.
pub fn feature_column(rows: &[SparseVector], feature: usize) -> Vec<SparseVector> {
    rows.iter()
        .map(|r| {
            let mut v = SparseVector::new();
            v.push_unchecked(0, r.get(feature));
            v
        })
        .collect()
}

/// Fits an independent detector on each of the first `features` columns.
pub fn fit_per_feature(train: &[SparseVector], features: usize, sigma: f64, delta: f64) -> Result<Vec<SvddModel>> {
    (0..features)
        .map(|j| svdd_fit(feature_column(train, j), sigma, delta))
        .collect()
}

/// Runs each per-feature detector on its own column of `test`.
pub fn detect_per_feature(models: &[SvddModel], test: &[SparseVector]) -> Vec<DetectionResult> {
    models
        .iter()
        .enumerate()
        .map(|(j, m)| m.detect(&feature_column(test, j)))
        .collect()
}
