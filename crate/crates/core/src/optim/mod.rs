//! Batch solvers for smooth + L1 composite problems.

mod fista;
mod lbfgs;
pub(crate) mod objective;
mod prox;
mod quadratic;
mod rcd;

pub(crate) use fista::fista_core;
pub use fista::{fista_minimize, proximal_gradient_minimize, FistaOptions};
pub use lbfgs::{lbfgs_minimize, LbfgsOptions};
pub use objective::{critical_lambda, lambda_max, HingeObjective};
pub use prox::{soft_threshold, soft_threshold_in_place, soft_threshold_scalar};
pub use quadratic::QuadraticProblem;
pub use rcd::{rcd_minimize, rcd_minimize_with, RcdOptions};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 5000;

/// A differentiable objective with a known global gradient Lipschitz bound.
/// Implementations must be pure: evaluation never mutates shared state.
pub trait SmoothProblem {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// Writes the gradient at `x` into `grad` and returns the value.
    fn value_and_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64;

    /// Upper bound on the Lipschitz constant of the gradient.
    fn lipschitz(&self) -> f64;
}

/// A smooth problem that exposes cheap partial derivatives through a cache
/// of intermediate quantities (for example the current margins).
pub trait CoordinateProblem: SmoothProblem {
    type Cache;

    fn cache(&self, x: &[f64]) -> Self::Cache;

    /// Lipschitz constant of the `j`-th partial derivative along `e_j`.
    fn coordinate_lipschitz(&self, j: usize) -> f64;

    fn partial(&self, x: &[f64], cache: &Self::Cache, j: usize) -> f64;

    /// Updates the cache after `x[j] += delta`.
    fn coordinate_moved(&self, cache: &mut Self::Cache, j: usize, delta: f64);
}

/// Outcome of an iterative solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solution: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after each iteration (index 0 is the starting point).
    pub objective_history: Vec<f64>,
    /// Per-iteration stopping quantity: step size for FISTA and RCD,
    /// gradient sup-norm for L-BFGS.
    pub residual_history: Vec<f64>,
}

pub(crate) fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
