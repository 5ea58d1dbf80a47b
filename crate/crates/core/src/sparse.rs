//! Sparse feature rows and labelled instances.

use std::fmt;

use crate::error::{Error, Result};

/// Binary class label. `Positive` is the rare (anomalous) class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    /// The label as `-1.0` / `+1.0`.
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Label::Negative => -1.0,
            Label::Positive => 1.0,
        }
    }

    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }

    /// Maps a score to a label; an exact zero goes to `Negative`.
    #[inline]
    pub fn from_score(score: f64) -> Self {
        if score > 0.0 {
            Label::Positive
        } else {
            Label::Negative
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Negative => f.write_str("-1"),
            Label::Positive => f.write_str("+1"),
        }
    }
}

/// A sparse row: strictly increasing indices, finite non-zero values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVector {
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vector from `(index, value)` pairs that are already in
    /// strictly increasing index order. Zero values are dropped.
    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, f64)>,
    {
        let mut v = Self::new();
        for (index, value) in pairs {
            if !value.is_finite() {
                return Err(Error::config(format!("non-finite value {value} at index {index}")));
            }
            if let Some(&last) = v.indices.last() {
                if index <= last {
                    return Err(Error::config(format!(
                        "indices must be strictly increasing: {index} after {last}"
                    )));
                }
            }
            v.push_unchecked(index, value);
        }
        Ok(v)
    }

    /// Non-zero entries of a dense slice.
    pub fn from_dense(dense: &[f64]) -> Self {
        let mut v = Self::new();
        for (j, &x) in dense.iter().enumerate() {
            v.push_unchecked(j, x);
        }
        v
    }

    /// Appends an entry; the caller guarantees ordering and finiteness.
    /// Zeros are skipped.
    pub(crate) fn push_unchecked(&mut self, index: usize, value: f64) {
        debug_assert!(self.indices.last().is_none_or(|&l| index > l));
        if value != 0.0 {
            self.indices.push(index);
            self.values.push(value);
        }
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    /// One past the largest stored index (0 when empty).
    pub fn dim_hint(&self) -> usize {
        self.indices.last().map_or(0, |&j| j + 1)
    }

    pub fn get(&self, index: usize) -> f64 {
        match self.indices.binary_search(&index) {
            Ok(pos) => self.values[pos],
            Err(_) => 0.0,
        }
    }

    /// Sparse-sparse dot product by merging the two index lists.
    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut a, mut b) = (0, 0);
        let mut acc = 0.0;
        while a < self.indices.len() && b < other.indices.len() {
            match self.indices[a].cmp(&other.indices[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.values[a] * other.values[b];
                    a += 1;
                    b += 1;
                }
            }
        }
        acc
    }

    /// Dot product with a dense vector. Indices past the end of `dense`
    /// contribute zero.
    #[inline]
    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.iter().map(|(j, x)| dense.get(j).map_or(0.0, |&w| w * x)).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|x| x * x).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `dense += alpha * self`, growing `dense` with zeros as needed.
    pub fn axpy_into(&self, alpha: f64, dense: &mut Vec<f64>) {
        let need = self.dim_hint();
        if dense.len() < need {
            dense.resize(need, 0.0);
        }
        for (j, x) in self.iter() {
            dense[j] += alpha * x;
        }
    }

    /// `alpha * self`; zero products are dropped.
    pub fn scaled(&self, alpha: f64) -> SparseVector {
        self.map_values(|x| alpha * x)
    }

    /// Applies `f(index, value)` to every stored entry, dropping zeros.
    pub fn map_indexed(&self, mut f: impl FnMut(usize, f64) -> f64) -> SparseVector {
        let mut out = SparseVector::new();
        for (j, x) in self.iter() {
            out.push_unchecked(j, f(j, x));
        }
        out
    }

    pub fn map_values(&self, mut f: impl FnMut(f64) -> f64) -> SparseVector {
        self.map_indexed(|_, x| f(x))
    }

    pub fn to_dense(&self, dim: usize) -> Vec<f64> {
        let mut d = vec![0.0; dim.max(self.dim_hint())];
        for (j, x) in self.iter() {
            d[j] = x;
        }
        d
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// A feature row paired with its class label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledInstance {
    pub features: SparseVector,
    pub label: Label,
}

impl LabeledInstance {
    pub fn new(features: SparseVector, label: Label) -> Self {
        Self { features, label }
    }

    /// `y * (w . x)`.
    #[inline]
    pub fn margin(&self, w: &[f64]) -> f64 {
        self.label.sign() * self.features.dot_dense(w)
    }
}

/// One past the largest feature index in `rows`.
pub fn dimension_of(rows: &[LabeledInstance]) -> usize {
    rows.iter().map(|r| r.features.dim_hint()).max().unwrap_or(0)
}
