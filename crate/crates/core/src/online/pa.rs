use crate::error::{Error, Result};
use crate::losses::{hinge_cs, ClassState};
use crate::sparse::{Label, LabeledInstance};

use super::{predict, OnlineLearner, StepOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PaVariant {
    Pa,
    Pa1,
    Pa2,
}

/// Step length of a passive-aggressive update.
///
/// - PA: `loss / ||x||^2`
/// - PA-1: `min(C, loss / ||x||^2)`
/// - PA-2: `loss / (||x||^2 + 1 / (2C))`
pub fn pa_tau(loss: f64, x_norm_sq: f64, variant: PaVariant, c: f64) -> f64 {
    if loss <= 0.0 || x_norm_sq <= 0.0 {
        return 0.0;
    }
    match variant {
        PaVariant::Pa => loss / x_norm_sq,
        PaVariant::Pa1 => c.min(loss / x_norm_sq),
        PaVariant::Pa2 => loss / (x_norm_sq + 1.0 / (2.0 * c)),
    }
}

/// Passive-aggressive learner. With `cost_sensitive` set this is the PAGMEAN
/// family: the hinge target is the class-dependent penalty `rho` instead of 1.
#[derive(Debug, Clone)]
pub struct PaModel {
    w: Vec<f64>,
    variant: PaVariant,
    c: f64,
    cost_sensitive: bool,
    class_state: ClassState,
}

impl PaModel {
    pub fn new(variant: PaVariant, c: f64, cost_sensitive: bool) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::config(format!("aggressiveness C must be positive, got {c}")));
        }
        Ok(Self {
            w: Vec::new(),
            variant,
            c,
            cost_sensitive,
            class_state: ClassState::new(),
        })
    }

    /// Starts from given weights instead of zero.
    pub fn with_weights(mut self, w: Vec<f64>) -> Self {
        self.w = w;
        self
    }

    /// Starts from given class counts instead of an empty history.
    pub fn with_class_state(mut self, state: ClassState) -> Self {
        self.class_state = state;
        self
    }

    pub fn class_state(&self) -> &ClassState {
        &self.class_state
    }

    pub fn variant(&self) -> PaVariant {
        self.variant
    }

    /// Penalty the next instance of class `y` would receive.
    pub fn rho(&self, y: Label) -> f64 {
        if self.cost_sensitive {
            self.class_state.rho(y)
        } else {
            1.0
        }
    }
}

impl OnlineLearner for PaModel {
    fn step(&mut self, inst: &LabeledInstance) -> StepOutcome {
        let x = &inst.features;
        let y = inst.label;
        let prediction = predict(&self.w, x);
        let rho = self.rho(y);
        self.class_state.observe(y, prediction);

        let loss = hinge_cs(inst.margin(&self.w), rho);
        let tau = pa_tau(loss, x.norm_sq(), self.variant, self.c);
        if tau > 0.0 {
            x.axpy_into(tau * y.sign(), &mut self.w);
        }
        StepOutcome { prediction, loss }
    }

    fn weights(&self) -> &[f64] {
        &self.w
    }
}
