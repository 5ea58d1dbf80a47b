//! Column scaling to `[-1, 1]` for batch and distributed training.
//!
//! Online learners run on raw features; only batch pipelines fit and apply a
//! normalizer. Features never seen at fit time pass through unchanged.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::sparse::{LabeledInstance, SparseVector};

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetStats {
    pub num_features: usize,
    pub per_feature_max_abs: BTreeMap<usize, f64>,
    pub positive_count: usize,
    pub negative_count: usize,
}

impl DatasetStats {
    pub fn rows(&self) -> usize {
        self.positive_count + self.negative_count
    }

    /// Scales each entry by its feature's max-abs. Unseen features and
    /// features with max-abs 0 are left as is.
    pub fn apply(&self, x: &SparseVector) -> SparseVector {
        x.map_indexed(|j, v| match self.per_feature_max_abs.get(&j) {
            Some(&s) if s > 0.0 => v / s,
            _ => v,
        })
    }

    pub fn apply_instance(&self, inst: &LabeledInstance) -> LabeledInstance {
        LabeledInstance::new(self.apply(&inst.features), inst.label)
    }

    pub fn apply_all(&self, rows: &[LabeledInstance]) -> Vec<LabeledInstance> {
        rows.iter().map(|r| self.apply_instance(r)).collect()
    }
}

pub fn fit_normalizer<'a, I>(data: I) -> Result<DatasetStats>
where
    I: IntoIterator<Item = &'a LabeledInstance>,
{
    let mut stats = DatasetStats {
        num_features: 0,
        per_feature_max_abs: BTreeMap::new(),
        positive_count: 0,
        negative_count: 0,
    };
    for inst in data {
        if inst.label.is_positive() {
            stats.positive_count += 1;
        } else {
            stats.negative_count += 1;
        }
        stats.num_features = stats.num_features.max(inst.features.dim_hint());
        for (j, v) in inst.features.iter() {
            let slot = stats.per_feature_max_abs.entry(j).or_insert(0.0);
            *slot = slot.max(v.abs());
        }
    }
    if stats.rows() == 0 {
        return Err(Error::EmptyInput("cannot fit a normalizer on zero rows"));
    }
    Ok(stats)
}
