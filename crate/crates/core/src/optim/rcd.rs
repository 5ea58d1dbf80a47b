//! Randomized coordinate descent with per-coordinate step `1 / L_j`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::{CoordinateProblem, SolveReport, DEFAULT_MAX_ITER, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RcdOptions {
    /// Budget in epochs of `dim` random coordinate steps.
    pub max_epochs: usize,
    /// Stop once every coordinate's next step would be at most `tol`.
    pub tol: f64,
    pub seed: u64,
}

impl Default for RcdOptions {
    fn default() -> Self {
        Self {
            max_epochs: DEFAULT_MAX_ITER,
            tol: DEFAULT_TOL,
            seed: 0,
        }
    }
}

pub fn rcd_minimize<P: CoordinateProblem + ?Sized>(p: &P, x0: &[f64], opts: RcdOptions) -> Result<SolveReport> {
    rcd_minimize_with(p, x0, opts, |_, _| {})
}

/// As [`rcd_minimize`], calling `on_step(j, x)` after every coordinate update.
pub fn rcd_minimize_with<P, F>(p: &P, x0: &[f64], opts: RcdOptions, mut on_step: F) -> Result<SolveReport>
where
    P: CoordinateProblem + ?Sized,
    F: FnMut(usize, &[f64]),
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let lips: Vec<f64> = (0..n).map(|j| p.coordinate_lipschitz(j)).collect();
    if let Some(bad) = lips.iter().find(|l| !(**l >= 0.0 && l.is_finite())) {
        return Err(Error::config(format!(
            "coordinate Lipschitz constants must be finite and >= 0, got {bad}"
        )));
    }
    // Coordinates with L_j = 0 have an identically zero partial derivative.
    let active: Vec<usize> = (0..n).filter(|&j| lips[j] > 0.0).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut cache = p.cache(&x);
    let f0 = p.value(&x);
    let mut report = SolveReport {
        solution: Vec::new(),
        objective: f0,
        iterations: 0,
        converged: false,
        objective_history: vec![f0],
        residual_history: Vec::new(),
    };

    let pending_step = |x: &[f64], cache: &P::Cache| -> f64 {
        active
            .iter()
            .map(|&j| (p.partial(x, cache, j) / lips[j]).abs())
            .fold(0.0, f64::max)
    };

    if active.is_empty() || pending_step(&x, &cache) <= opts.tol {
        report.converged = true;
    } else {
        for epoch in 1..=opts.max_epochs {
            let mut largest = 0.0_f64;
            for _ in 0..active.len() {
                let j = active[rng.gen_range(0..active.len())];
                let delta = -p.partial(&x, &cache, j) / lips[j];
                if delta != 0.0 {
                    x[j] += delta;
                    p.coordinate_moved(&mut cache, j, delta);
                }
                largest = largest.max(delta.abs());
                on_step(j, &x);
            }
            report.iterations = epoch;
            let f = p.value(&x);
            if !f.is_finite() {
                return Err(Error::Divergence { iteration: epoch });
            }
            report.objective_history.push(f);
            report.residual_history.push(largest);
            // A quiet epoch may have skipped coordinates; confirm on all of them.
            if largest <= opts.tol && pending_step(&x, &cache) <= opts.tol {
                report.converged = true;
                break;
            }
        }
    }
    report.objective = p.value(&x);
    report.solution = x;
    Ok(report)
}
