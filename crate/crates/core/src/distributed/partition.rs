use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sparse::LabeledInstance;

/// One worker's rows and its consensus-ADMM locals.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkerPartition {
    pub worker_id: usize,
    pub rows: Vec<LabeledInstance>,
    pub w_local: Vec<f64>,
    pub u_dual: Vec<f64>,
}

/// Splits `data` into `n_workers` contiguous chunks whose sizes differ by at
/// most one (earlier workers get the extra rows). With `shuffle_seed` the
/// rows are permuted first.
pub fn partition_rows(
    data: &[LabeledInstance],
    n_workers: usize,
    shuffle_seed: Option<u64>,
) -> Result<Vec<WorkerPartition>> {
    if n_workers == 0 {
        return Err(Error::config("need at least one worker"));
    }
    if n_workers > data.len() {
        return Err(Error::config(format!(
            "{n_workers} workers for only {} rows",
            data.len()
        )));
    }
    let mut order: Vec<usize> = (0..data.len()).collect();
    if let Some(seed) = shuffle_seed {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let base = data.len() / n_workers;
    let extra = data.len() % n_workers;
    let mut start = 0;
    Ok((0..n_workers)
        .map(|k| {
            let len = base + usize::from(k < extra);
            let rows = order[start..start + len].iter().map(|&i| data[i].clone()).collect();
            start += len;
            WorkerPartition {
                worker_id: k,
                rows,
                w_local: Vec::new(),
                u_dual: Vec::new(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::{Label, SparseVector};

    fn data(n: usize) -> Vec<LabeledInstance> {
        (0..n)
            .map(|i| {
                LabeledInstance::new(
                    SparseVector::from_pairs([(0, i as f64 + 1.0)]).unwrap(),
                    Label::Negative,
                )
            })
            .collect()
    }

    fn sizes(p: &[WorkerPartition]) -> Vec<usize> {
        p.iter().map(|w| w.rows.len()).collect()
    }

    #[test]
    fn chunk_sizes() {
        let d = data(10);
        assert_eq!(sizes(&partition_rows(&d, 2, None).unwrap()), vec![5, 5]);
        assert_eq!(sizes(&partition_rows(&d, 3, None).unwrap()), vec![4, 3, 3]);
        let one = partition_rows(&d, 1, None).unwrap();
        assert_eq!(one[0].rows, d);
        assert!(partition_rows(&d, 11, None).is_err());
        assert!(partition_rows(&d, 0, None).is_err());
    }

    #[test]
    fn shuffled_partitions_cover_disjointly_and_deterministically() {
        let d = data(23);
        let a = partition_rows(&d, 4, Some(7)).unwrap();
        assert_eq!(a, partition_rows(&d, 4, Some(7)).unwrap());
        let mut seen: Vec<f64> = a
            .iter()
            .flat_map(|p| p.rows.iter().map(|r| r.features.get(0)))
            .collect();
        seen.sort_by(f64::total_cmp);
        assert_eq!(seen, (1..=23).map(|i| i as f64).collect::<Vec<_>>());
        assert_ne!(a[0].rows, partition_rows(&d, 4, None).unwrap()[0].rows);
    }
}
