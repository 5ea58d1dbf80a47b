//! The cost-weighted smooth-hinge objective for batch training, with an
//! optional proximal term used by the consensus-ADMM worker subproblems.

use crate::losses::{smooth_hinge_cs, smooth_hinge_dmargin, ClassWeights};
use crate::sparse::{dimension_of, LabeledInstance};

use super::{sup_norm, CoordinateProblem, SmoothProblem};

/// `(1/m) sum_i rho_i * smooth_hinge(y_i w.x_i) [+ (penalty/2) ||w - anchor||^2]`
/// where the sum runs over `rows` and `m` is `normalizer` (the global row
/// count when `rows` is one worker's share).
#[derive(Debug, Clone)]
pub struct HingeObjective<'a> {
    rows: &'a [LabeledInstance],
    weights: ClassWeights,
    dim: usize,
    normalizer: f64,
    penalty: f64,
    anchor: Vec<f64>,
    /// Column-major view: for feature `j`, the `(row, y_i * x_ij)` pairs.
    columns: Vec<Vec<(usize, f64)>>,
    lipschitz: f64,
}

impl<'a> HingeObjective<'a> {
    /// Objective over all of `rows`, normalised by `rows.len()`.
    pub fn new(rows: &'a [LabeledInstance], weights: ClassWeights, dim: usize) -> Self {
        Self::partial(rows, weights, dim, rows.len())
    }

    /// Objective over a share of a dataset with `total_rows` rows.
    pub fn partial(rows: &'a [LabeledInstance], weights: ClassWeights, dim: usize, total_rows: usize) -> Self {
        let dim = dim.max(dimension_of(rows));
        let mut columns = vec![Vec::new(); dim];
        for (i, r) in rows.iter().enumerate() {
            let y = r.label.sign();
            for (j, x) in r.features.iter() {
                columns[j].push((i, y * x));
            }
        }
        let normalizer = total_rows.max(1) as f64;
        let lipschitz = curvature_sum(rows, weights) / normalizer;
        Self {
            rows,
            weights,
            dim,
            normalizer,
            penalty: 0.0,
            anchor: Vec::new(),
            columns,
            lipschitz,
        }
    }

    /// Adds `(penalty/2) ||w - anchor||^2`.
    pub fn with_proximal_term(mut self, penalty: f64, anchor: Vec<f64>) -> Self {
        assert_eq!(anchor.len(), self.dim, "anchor dimension mismatch");
        self.penalty = penalty;
        self.anchor = anchor;
        self
    }

    pub fn set_anchor(&mut self, anchor: &[f64]) {
        self.anchor.clear();
        self.anchor.extend_from_slice(anchor);
    }

    pub fn rows(&self) -> &[LabeledInstance] {
        self.rows
    }

    pub fn weights(&self) -> ClassWeights {
        self.weights
    }

    /// Un-normalised loss sum over the rows; accumulates the un-normalised
    /// gradient sum into `grad_sum` when given. Rows are visited in order.
    pub fn accumulate(&self, w: &[f64], grad_sum: Option<&mut [f64]>) -> f64 {
        accumulate_rows(self.rows, self.weights, w, grad_sum)
    }

    fn proximal_value(&self, w: &[f64]) -> f64 {
        if self.penalty == 0.0 {
            return 0.0;
        }
        let sq: f64 = w.iter().zip(&self.anchor).map(|(a, b)| (a - b) * (a - b)).sum();
        0.5 * self.penalty * sq
    }
}

/// Shared by the centralized objective and the distributed trainers so that
/// a one-worker run performs the same arithmetic as a centralized one.
pub(crate) fn accumulate_rows(
    rows: &[LabeledInstance],
    weights: ClassWeights,
    w: &[f64],
    mut grad_sum: Option<&mut [f64]>,
) -> f64 {
    let mut loss = 0.0;
    for r in rows {
        let rho = weights.of(r.label);
        let margin = r.margin(w);
        loss += smooth_hinge_cs(margin, rho);
        if let Some(g) = grad_sum.as_deref_mut() {
            let coef = smooth_hinge_dmargin(margin, rho) * r.label.sign();
            if coef != 0.0 {
                for (j, x) in r.features.iter() {
                    g[j] += coef * x;
                }
            }
        }
    }
    loss
}

/// `sum_i rho_i ||x_i||^2`; divided by `m` it bounds the Hessian norm.
pub(crate) fn curvature_sum(rows: &[LabeledInstance], weights: ClassWeights) -> f64 {
    rows.iter().map(|r| weights.of(r.label) * r.features.norm_sq()).sum()
}

impl SmoothProblem for HingeObjective<'_> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, w: &[f64]) -> f64 {
        self.accumulate(w, None) / self.normalizer + self.proximal_value(w)
    }

    fn value_and_gradient(&self, w: &[f64], grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let loss = self.accumulate(w, Some(grad));
        for g in grad.iter_mut() {
            *g /= self.normalizer;
        }
        if self.penalty != 0.0 {
            for ((g, a), b) in grad.iter_mut().zip(w).zip(&self.anchor) {
                *g += self.penalty * (a - b);
            }
        }
        loss / self.normalizer + self.proximal_value(w)
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz + self.penalty
    }
}

impl CoordinateProblem for HingeObjective<'_> {
    /// Margins `y_i w.x_i`, one per row.
    type Cache = Vec<f64>;

    fn cache(&self, w: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| r.margin(w)).collect()
    }

    fn coordinate_lipschitz(&self, j: usize) -> f64 {
        let s: f64 = self.columns[j]
            .iter()
            .map(|&(i, yx)| self.weights.of(self.rows[i].label) * yx * yx)
            .sum();
        s / self.normalizer + self.penalty
    }

    fn partial(&self, w: &[f64], margins: &Vec<f64>, j: usize) -> f64 {
        let s: f64 = self.columns[j]
            .iter()
            .map(|&(i, yx)| smooth_hinge_dmargin(margins[i], self.weights.of(self.rows[i].label)) * yx)
            .sum();
        let mut g = s / self.normalizer;
        if self.penalty != 0.0 {
            g += self.penalty * (w[j] - self.anchor[j]);
        }
        g
    }

    fn coordinate_moved(&self, margins: &mut Vec<f64>, j: usize, delta: f64) {
        for &(i, yx) in &self.columns[j] {
            margins[i] += delta * yx;
        }
    }
}

/// `(1/m) ||X' y~||_inf` with `y~_i = m_-/m` for positives and `-m_+/m` for
/// negatives. Used to set the default regularisation `0.1 * lambda_max`.
pub fn lambda_max(rows: &[LabeledInstance]) -> f64 {
    let m = rows.len();
    if m == 0 {
        return 0.0;
    }
    let m_pos = rows.iter().filter(|r| r.label.is_positive()).count() as f64;
    let m_neg = m as f64 - m_pos;
    let mf = m as f64;
    let mut xty = vec![0.0; dimension_of(rows)];
    for r in rows {
        let yt = if r.label.is_positive() { m_neg / mf } else { -m_pos / mf };
        r.features.axpy_into(yt, &mut xty);
    }
    sup_norm(&xty) / mf
}

/// `||grad f(0)||_inf` for the cost-weighted smooth hinge: the smallest
/// `lambda` for which `w = 0` minimises the L1-regularised objective.
pub fn critical_lambda(rows: &[LabeledInstance], weights: ClassWeights) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    let p = HingeObjective::new(rows, weights, 0);
    let mut g = vec![0.0; p.dim()];
    p.value_and_gradient(&vec![0.0; p.dim()], &mut g);
    sup_norm(&g)
}
