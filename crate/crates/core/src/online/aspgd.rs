//! Accelerated stochastic proximal gradient descent with the smooth
//! cost-sensitive hinge.
//!
//! Per instance, with a Euclidean mirror map (so the dual-to-primal map is
//! the identity):
//!
//! ```text
//! u     = soft_threshold(theta, eta * lambda)
//! w     = (1 - gamma) * w_prev + gamma * u
//! y_hat = sign(w . x)
//! theta = theta - eta * grad(loss)(w)      if loss > 0
//! w_prev = w
//! ```
//!
//! `gamma = (1 - sqrt(mu*eta)) / (1 + sqrt(mu*eta))` when accelerated and 1
//! otherwise. The strong-convexity estimate `mu` tracks the most recent
//! penalty `rho`, and by default `eta = 1 / (mu + 1)`.

use crate::error::{Error, Result};
use crate::losses::{smooth_hinge_cs, smooth_hinge_dmargin, ClassState};
use crate::optim::soft_threshold_in_place;
use crate::sparse::LabeledInstance;

use super::{predict, OnlineLearner, StepOutcome};

/// Momentum blend weight for a given `mu * eta` in `[0, 1)`.
pub fn acceleration_gamma(mu_eta: f64) -> f64 {
    let s = mu_eta.sqrt();
    (1.0 - s) / (1.0 + s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AspgdConfig {
    /// L1 strength.
    pub lambda: f64,
    /// Fixed step size; `None` uses `1 / (mu + 1)` recomputed every step.
    pub eta: Option<f64>,
    /// Fixed strong-convexity parameter; `None` estimates it online.
    pub mu: Option<f64>,
    /// `false` pins `gamma = 1` (no momentum).
    pub accelerated: bool,
}

impl Default for AspgdConfig {
    fn default() -> Self {
        Self {
            lambda: 0.0,
            eta: None,
            mu: None,
            accelerated: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AspgdModel {
    config: AspgdConfig,
    theta: Vec<f64>,
    w: Vec<f64>,
    w_prev: Vec<f64>,
    /// Online estimate of mu, starting at the cold-start penalty.
    mu_estimate: f64,
    class_state: ClassState,
}

impl AspgdModel {
    pub fn new(config: AspgdConfig) -> Result<Self> {
        if !(config.lambda >= 0.0 && config.lambda.is_finite()) {
            return Err(Error::config(format!("lambda must be >= 0, got {}", config.lambda)));
        }
        if let Some(eta) = config.eta {
            if !(eta > 0.0 && eta.is_finite()) {
                return Err(Error::config(format!("eta must be positive, got {eta}")));
            }
        }
        if let Some(mu) = config.mu {
            if !(mu >= 0.0 && mu.is_finite()) {
                return Err(Error::config(format!("mu must be >= 0, got {mu}")));
            }
        }
        if config.accelerated {
            match (config.eta, config.mu) {
                (Some(eta), Some(mu)) if mu * eta >= 1.0 => {
                    return Err(Error::config(format!(
                        "acceleration needs mu * eta < 1, got {mu} * {eta}"
                    )));
                }
                (Some(_), None) => {
                    return Err(Error::config(
                        "a fixed eta with acceleration needs a fixed mu so that mu * eta < 1 holds",
                    ));
                }
                _ => {}
            }
        }
        Ok(Self {
            config,
            theta: Vec::new(),
            w: Vec::new(),
            w_prev: Vec::new(),
            mu_estimate: 1.0,
            class_state: ClassState::new(),
        })
    }

    pub fn config(&self) -> &AspgdConfig {
        &self.config
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn class_state(&self) -> &ClassState {
        &self.class_state
    }

    /// `(mu, eta, gamma)` that the next step will use.
    pub fn schedule(&self) -> (f64, f64, f64) {
        let mu = self.config.mu.unwrap_or(self.mu_estimate);
        let eta = self.config.eta.unwrap_or(1.0 / (mu + 1.0));
        let gamma = if self.config.accelerated {
            acceleration_gamma(mu * eta)
        } else {
            1.0
        };
        (mu, eta, gamma)
    }

    fn grow(&mut self, dim: usize) {
        if self.theta.len() < dim {
            self.theta.resize(dim, 0.0);
            self.w_prev.resize(dim, 0.0);
        }
    }
}

impl OnlineLearner for AspgdModel {
    fn step(&mut self, inst: &LabeledInstance) -> StepOutcome {
        let x = &inst.features;
        let y = inst.label;
        self.grow(x.dim_hint());
        let (_, eta, gamma) = self.schedule();

        // u = prox(v) with v = theta; w reuses its buffer.
        let mut w = std::mem::take(&mut self.w);
        w.clear();
        w.extend_from_slice(&self.theta);
        soft_threshold_in_place(&mut w, eta * self.config.lambda);
        if gamma != 1.0 {
            for (wj, &pj) in w.iter_mut().zip(&self.w_prev) {
                *wj = (1.0 - gamma) * pj + gamma * *wj;
            }
        }

        let prediction = predict(&w, x);
        let rho = self.class_state.rho(y);
        self.class_state.observe(y, prediction);

        let margin = inst.margin(&w);
        let loss = smooth_hinge_cs(margin, rho);
        if loss > 0.0 {
            let coef = smooth_hinge_dmargin(margin, rho) * y.sign();
            for (j, xj) in x.iter() {
                self.theta[j] -= eta * (coef * xj);
            }
        }

        self.w_prev.clear();
        self.w_prev.extend_from_slice(&w);
        self.w = w;
        self.mu_estimate = rho;
        StepOutcome { prediction, loss }
    }

    fn weights(&self) -> &[f64] {
        &self.w
    }
}
