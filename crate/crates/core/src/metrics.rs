//! Confusion accounting and imbalance-aware evaluation metrics.
//!
//! Every ratio with a zero denominator is reported as 0.

use std::io::Write;

use crate::error::{Error, Result};
use crate::sparse::Label;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl ConfusionCounts {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records one prediction.
    pub fn update(&mut self, y_true: Label, y_pred: Label) {
        match (y_true, y_pred) {
            (Label::Positive, Label::Positive) => self.tp += 1,
            (Label::Negative, Label::Negative) => self.tn += 1,
            (Label::Negative, Label::Positive) => self.fp += 1,
            (Label::Positive, Label::Negative) => self.fn_ += 1,
        }
    }

    /// Functional form of [`update`](Self::update).
    pub fn with(mut self, y_true: Label, y_pred: Label) -> Self {
        self.update(y_true, y_pred);
        self
    }

    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn mistakes(&self) -> u64 {
        self.fp + self.fn_
    }

    /// Recall on the positive class.
    pub fn sensitivity(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    /// Recall on the negative class.
    pub fn specificity(&self) -> f64 {
        ratio(self.tn, self.tn + self.fp)
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn gmean(&self) -> f64 {
        (self.sensitivity() * self.specificity()).sqrt()
    }

    /// Balanced accuracy, `0.5 * sensitivity + 0.5 * specificity`.
    pub fn sum_metric(&self) -> f64 {
        0.5 * self.sensitivity() + 0.5 * self.specificity()
    }

    /// F1 score.
    pub fn fmeasure(&self) -> f64 {
        let p = self.precision();
        let r = self.sensitivity();
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }

    pub fn accuracy(&self) -> Result<f64> {
        self.nonempty()?;
        Ok(ratio(self.tp + self.tn, self.total()))
    }

    pub fn mistake_rate(&self) -> Result<f64> {
        self.nonempty()?;
        Ok(ratio(self.mistakes(), self.total()))
    }

    fn nonempty(&self) -> Result<()> {
        if self.total() == 0 {
            Err(Error::EmptyInput("no predictions scored"))
        } else {
            Ok(())
        }
    }
}

/// One emission point of an online evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub samples_seen: u64,
    pub gmean: f64,
    pub mistake_rate: f64,
    pub fmeasure: f64,
    pub sum: f64,
}

impl TraceRow {
    /// Snapshot of cumulative metrics; `None` before the first prediction.
    pub fn from_counts(c: &ConfusionCounts) -> Option<Self> {
        Some(Self {
            samples_seen: c.total(),
            gmean: c.gmean(),
            mistake_rate: c.mistake_rate().ok()?,
            fmeasure: c.fmeasure(),
            sum: c.sum_metric(),
        })
    }
}

pub const TRACE_HEADER: &str = "samples_seen,gmean,mistake_rate,fmeasure,sum";

/// Cumulative-from-start metric trace.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricTrace {
    rows: Vec<TraceRow>,
}

impl MetricTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rows(&self) -> &[TraceRow] {
        &self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    /// Appends a snapshot. Snapshots that do not advance `samples_seen` are
    /// ignored so the trace stays strictly increasing.
    pub fn record(&mut self, c: &ConfusionCounts) {
        let Some(row) = TraceRow::from_counts(c) else {
            return;
        };
        if self.rows.last().is_none_or(|r| r.samples_seen < row.samples_seen) {
            self.rows.push(row);
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{TRACE_HEADER}")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{:.6},{:.6},{:.6},{:.6}",
                r.samples_seen, r.gmean, r.mistake_rate, r.fmeasure, r.sum
            )?;
        }
        Ok(())
    }
}
