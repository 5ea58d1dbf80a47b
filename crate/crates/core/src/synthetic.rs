//! Seeded synthetic data: imbalanced linearly separable streams and Gaussian
//! clusters.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::sparse::{Label, LabeledInstance, SparseVector};

/// Parameters for [`separable_stream`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparableSpec {
    pub samples: usize,
    pub features: usize,
    /// Fraction of rows in the positive (minority) class.
    pub positive_fraction: f64,
    /// Minimum `|w* . x|` with `||w*|| = 1`.
    pub margin: f64,
    /// Probability that a feature is non-zero in a row.
    pub density: f64,
    /// Scale every row to unit Euclidean norm; the margin then applies to
    /// the normalized row.
    pub unit_norm: bool,
    pub seed: u64,
}

impl Default for SeparableSpec {
    fn default() -> Self {
        Self {
            samples: 10_000,
            features: 50,
            positive_fraction: 0.1,
            margin: 0.1,
            density: 1.0,
            unit_norm: true,
            seed: 0,
        }
    }
}

/// Rows labelled by a random unit hyperplane through the origin, with a
/// margin and exactly `round(samples * positive_fraction)` positives in
/// random order.
pub fn separable_stream(spec: &SeparableSpec) -> Vec<LabeledInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let teacher = random_unit(&mut rng, spec.features);

    let n_pos = (spec.samples as f64 * spec.positive_fraction).round() as usize;
    let mut labels: Vec<Label> = (0..spec.samples)
        .map(|i| if i < n_pos { Label::Positive } else { Label::Negative })
        .collect();
    labels.shuffle(&mut rng);

    labels
        .into_iter()
        .map(|label| loop {
            let dense: Vec<f64> = (0..spec.features)
                .map(|_| {
                    if spec.density >= 1.0 || rng.gen_bool(spec.density) {
                        rng.sample(StandardNormal)
                    } else {
                        0.0
                    }
                })
                .collect();
            let mut dense = dense;
            if spec.unit_norm {
                let norm = dense.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm == 0.0 {
                    continue;
                }
                dense.iter_mut().for_each(|v| *v /= norm);
            }
            let score: f64 = dense.iter().zip(&teacher).map(|(a, b)| a * b).sum();
            if score.abs() < spec.margin {
                continue;
            }
            // Reflect onto the wanted side; the margin is symmetric.
            let flip = (score > 0.0) != label.is_positive();
            let dense: Vec<f64> = if flip {
                dense.iter().map(|v| -v).collect()
            } else {
                dense
            };
            break LabeledInstance::new(SparseVector::from_dense(&dense), label);
        })
        .collect()
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

/// `n` points from an isotropic Gaussian with the given center and standard
/// deviation.
pub fn gaussian_cluster(n: usize, center: &[f64], std_dev: f64, seed: u64) -> Vec<SparseVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let p: Vec<f64> = center
                .iter()
                .map(|c| c + std_dev * rng.sample::<f64, _>(StandardNormal))
                .collect();
            SparseVector::from_dense(&p)
        })
        .collect()
}

/// Points at exactly `radius` from `center` in uniformly random directions.
pub fn points_on_sphere(n: usize, center: &[f64], radius: f64, seed: u64) -> Vec<SparseVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let u = random_unit(&mut rng, center.len());
            let p: Vec<f64> = center.iter().zip(&u).map(|(c, d)| c + radius * d).collect();
            SparseVector::from_dense(&p)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_has_exact_class_balance_and_is_seeded() {
        let spec = SeparableSpec {
            samples: 500,
            features: 10,
            ..Default::default()
        };
        let rows = separable_stream(&spec);
        assert_eq!(rows.len(), 500);
        assert_eq!(rows.iter().filter(|r| r.label.is_positive()).count(), 50);
        assert_eq!(rows, separable_stream(&spec));
        assert_ne!(rows, separable_stream(&SeparableSpec { seed: 1, ..spec }));
    }

    #[test]
    fn sphere_points_have_the_requested_radius() {
        for p in points_on_sphere(20, &[1.0, -2.0], 3.0, 4) {
            let d = p.to_dense(2);
            let r = ((d[0] - 1.0).powi(2) + (d[1] + 2.0).powi(2)).sqrt();
            assert!((r - 3.0).abs() < 1e-12);
        }
    }
}
