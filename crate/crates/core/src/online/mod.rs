//! Single-pass streaming learners.

mod aspgd;
mod pa;
mod stream;

use std::fmt;
use std::str::FromStr;

pub use aspgd::{acceleration_gamma, AspgdConfig, AspgdModel};
pub use pa::{pa_tau, PaModel, PaVariant};
pub use stream::{run_slice, run_stream, StreamReport};

use crate::error::{Error, Result};
use crate::sparse::{Label, LabeledInstance, SparseVector};

/// `sign(w . x)` with ties going to the negative class.
#[inline]
pub fn predict(w: &[f64], x: &SparseVector) -> Label {
    Label::from_score(x.dot_dense(w))
}

/// Result of processing one instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub prediction: Label,
    pub loss: f64,
}

pub trait OnlineLearner {
    /// Predicts `inst`, then learns from its label.
    fn step(&mut self, inst: &LabeledInstance) -> StepOutcome;

    /// The weights used for the most recent prediction.
    fn weights(&self) -> &[f64];
}

impl<L: OnlineLearner + ?Sized> OnlineLearner for Box<L> {
    fn step(&mut self, inst: &LabeledInstance) -> StepOutcome {
        (**self).step(inst)
    }

    fn weights(&self) -> &[f64] {
        (**self).weights()
    }
}

/// The learners selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Pa,
    Pa1,
    Pa2,
    Pagmean,
    Pagmean1,
    Pagmean2,
    Aspgd,
    AspgdNoAcc,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::Pa,
        Algorithm::Pa1,
        Algorithm::Pa2,
        Algorithm::Pagmean,
        Algorithm::Pagmean1,
        Algorithm::Pagmean2,
        Algorithm::Aspgd,
        Algorithm::AspgdNoAcc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Pa => "pa",
            Algorithm::Pa1 => "pa1",
            Algorithm::Pa2 => "pa2",
            Algorithm::Pagmean => "pagmean",
            Algorithm::Pagmean1 => "pagmean1",
            Algorithm::Pagmean2 => "pagmean2",
            Algorithm::Aspgd => "aspgd",
            Algorithm::AspgdNoAcc => "aspgdnoacc",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::config(format!("unknown online algorithm {s:?}")))
    }
}

/// Hyperparameters shared by the named learners. Each learner reads only the
/// ones it uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnerParams {
    /// PA aggressiveness.
    pub c: f64,
    pub lambda: f64,
    pub eta: Option<f64>,
    pub mu: Option<f64>,
}

impl Default for LearnerParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            lambda: 0.0,
            eta: None,
            mu: None,
        }
    }
}

/// Builds a learner by name.
pub fn build_learner(algo: Algorithm, p: &LearnerParams) -> Result<Box<dyn OnlineLearner + Send>> {
    let pa = |variant, cost_sensitive| -> Result<Box<dyn OnlineLearner + Send>> {
        Ok(Box::new(PaModel::new(variant, p.c, cost_sensitive)?))
    };
    match algo {
        Algorithm::Pa => pa(PaVariant::Pa, false),
        Algorithm::Pa1 => pa(PaVariant::Pa1, false),
        Algorithm::Pa2 => pa(PaVariant::Pa2, false),
        Algorithm::Pagmean => pa(PaVariant::Pa, true),
        Algorithm::Pagmean1 => pa(PaVariant::Pa1, true),
        Algorithm::Pagmean2 => pa(PaVariant::Pa2, true),
        Algorithm::Aspgd | Algorithm::AspgdNoAcc => {
            let cfg = AspgdConfig {
                lambda: p.lambda,
                eta: p.eta,
                mu: p.mu,
                accelerated: algo == Algorithm::Aspgd,
            };
            Ok(Box::new(AspgdModel::new(cfg)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predict_tie_rule() {
        let x = SparseVector::from_pairs([(0, 1.0)]).unwrap();
        assert_eq!(predict(&[0.3], &x), Label::Positive);
        assert_eq!(predict(&[-0.3], &x), Label::Negative);
        assert_eq!(predict(&[0.0], &x), Label::Negative);
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("bogus".parse::<Algorithm>().is_err());
    }

    #[test]
    fn every_named_learner_builds() {
        for a in Algorithm::ALL {
            assert!(build_learner(a, &LearnerParams::default()).is_ok(), "{a}");
        }
    }
}
