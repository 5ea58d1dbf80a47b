//! Cost-sensitive losses and the running class statistics behind the online
//! penalty `rho`.

use crate::error::{Error, Result};
use crate::sparse::{Label, LabeledInstance, SparseVector};

/// Streaming class counts: positives `P`, negatives `N` and false negatives
/// `Fn` committed so far. Counts are never reset.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClassState {
    pub positives: u64,
    pub negatives: u64,
    pub false_negatives: u64,
}

impl ClassState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Penalty for an incoming example of class `y`: `N/P` for positives and
    /// `(P - Fn)/P` for negatives. Both fall back to 1 while `P = 0`.
    pub fn rho(&self, y: Label) -> f64 {
        if self.positives == 0 {
            return 1.0;
        }
        let p = self.positives as f64;
        match y {
            Label::Positive => self.negatives as f64 / p,
            Label::Negative => (self.positives - self.false_negatives) as f64 / p,
        }
    }

    /// Folds in a labelled example after its prediction was made.
    pub fn observe(&mut self, y: Label, y_pred: Label) {
        match y {
            Label::Positive => {
                self.positives += 1;
                if y_pred == Label::Negative {
                    self.false_negatives += 1;
                }
            }
            Label::Negative => self.negatives += 1,
        }
    }
}

/// Free-function form of [`ClassState::rho`].
pub fn rho(state: &ClassState, y: Label) -> f64 {
    state.rho(y)
}

/// Misclassification costs for the two classes; they sum to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostPair {
    c_pos: f64,
    c_neg: f64,
}

impl CostPair {
    pub fn new(c_pos: f64, c_neg: f64) -> Result<Self> {
        let open_unit = |c: f64| c > 0.0 && c < 1.0;
        if !open_unit(c_pos) || !open_unit(c_neg) {
            return Err(Error::config(format!(
                "costs must lie in (0, 1), got ({c_pos}, {c_neg})"
            )));
        }
        if (c_pos + c_neg - 1.0).abs() > 1e-12 {
            return Err(Error::config(format!("costs must sum to 1, got {c_pos} + {c_neg}")));
        }
        Ok(Self { c_pos, c_neg })
    }

    pub fn positive(&self) -> f64 {
        self.c_pos
    }

    pub fn negative(&self) -> f64 {
        self.c_neg
    }
}

impl Default for CostPair {
    fn default() -> Self {
        Self { c_pos: 0.9, c_neg: 0.1 }
    }
}

/// Per-class loss weights used by batch objectives. Unlike [`CostPair`] the
/// weights need not sum to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassWeights {
    pub positive: f64,
    pub negative: f64,
}

impl ClassWeights {
    pub fn uniform(w: f64) -> Self {
        Self {
            positive: w,
            negative: w,
        }
    }

    #[inline]
    pub fn of(&self, y: Label) -> f64 {
        match y {
            Label::Positive => self.positive,
            Label::Negative => self.negative,
        }
    }
}

impl From<CostPair> for ClassWeights {
    fn from(c: CostPair) -> Self {
        Self {
            positive: c.c_pos,
            negative: c.c_neg,
        }
    }
}

/// `max(0, rho - margin)` where `margin = y * f(x)`.
#[inline]
pub fn hinge_cs(margin: f64, rho: f64) -> f64 {
    (rho - margin).max(0.0)
}

/// `(rho / 2) * max(0, 1 - margin)^2`.
#[inline]
pub fn smooth_hinge_cs(margin: f64, rho: f64) -> f64 {
    let r = (1.0 - margin).max(0.0);
    0.5 * rho * r * r
}

/// Derivative of [`smooth_hinge_cs`] with respect to the margin.
#[inline]
pub fn smooth_hinge_dmargin(margin: f64, rho: f64) -> f64 {
    -rho * (1.0 - margin).max(0.0)
}

/// Gradient of the smooth hinge in `w`: `-rho * y * max(0, 1 - y w.x) * x`.
/// Its support is contained in the support of `x`.
pub fn smooth_hinge_grad(w: &[f64], x: &SparseVector, y: Label, rho: f64) -> SparseVector {
    let margin = y.sign() * x.dot_dense(w);
    let coef = smooth_hinge_dmargin(margin, rho) * y.sign();
    if coef == 0.0 {
        return SparseVector::new();
    }
    x.scaled(coef)
}

pub fn l1_norm(w: &[f64]) -> f64 {
    w.iter().map(|x| x.abs()).sum()
}

/// `(1/m) sum_i rho_i * smooth_hinge(y_i w.x_i) + lambda * ||w||_1`, with
/// `rho_i` the weight of example `i`'s class.
pub fn batch_objective(
    rows: &[LabeledInstance],
    w: &[f64],
    lambda: f64,
    weights: impl Into<ClassWeights>,
) -> Result<f64> {
    if rows.is_empty() {
        return Err(Error::EmptyInput("objective over zero rows"));
    }
    let weights = weights.into();
    let loss: f64 = rows
        .iter()
        .map(|r| smooth_hinge_cs(r.margin(w), weights.of(r.label)))
        .sum();
    Ok(loss / rows.len() as f64 + lambda * l1_norm(w))
}
