use crate::error::{Error, Result};
use crate::metrics::{ConfusionCounts, MetricTrace};
use crate::sparse::LabeledInstance;

use super::OnlineLearner;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StreamReport {
    pub counts: ConfusionCounts,
    pub trace: MetricTrace,
    pub cumulative_loss: f64,
}

/// Runs a learner over a stream in one pass. Cumulative metrics are traced
/// every `trace_every` samples and once more at the end of the stream.
pub fn run_stream<L, I>(learner: &mut L, instances: I, trace_every: usize) -> Result<StreamReport>
where
    L: OnlineLearner + ?Sized,
    I: IntoIterator<Item = Result<LabeledInstance>>,
{
    if trace_every == 0 {
        return Err(Error::config("trace cadence must be at least 1"));
    }
    let mut report = StreamReport::default();
    for inst in instances {
        let inst = inst?;
        let out = learner.step(&inst);
        report.counts.update(inst.label, out.prediction);
        report.cumulative_loss += out.loss;
        if report.counts.total() % trace_every as u64 == 0 {
            report.trace.record(&report.counts);
        }
    }
    report.trace.record(&report.counts);
    Ok(report)
}

pub fn run_slice<L>(learner: &mut L, rows: &[LabeledInstance], trace_every: usize) -> Result<StreamReport>
where
    L: OnlineLearner + ?Sized,
{
    run_stream(learner, rows.iter().cloned().map(Ok), trace_every)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::online::{PaModel, PaVariant};
    use crate::sparse::{Label, SparseVector};
    use std::cell::Cell;

    fn inst(v: f64, y: Label) -> LabeledInstance {
        LabeledInstance::new(SparseVector::from_pairs([(0, v)]).unwrap(), y)
    }

    #[test]
    fn empty_stream() {
        let mut m = PaModel::new(PaVariant::Pa, 1.0, false).unwrap();
        let r = run_slice(&mut m, &[], 10).unwrap();
        assert!(r.trace.is_empty());
        assert_eq!(r.counts.total(), 0);
    }

    #[test]
    fn pretrained_separable_stream_makes_no_mistakes() {
        let mut m = PaModel::new(PaVariant::Pa, 1.0, false)
            .unwrap()
            .with_weights(vec![10.0]);
        let rows: Vec<_> = (1..=50)
            .map(|i| {
                if i % 5 == 0 {
                    inst(i as f64, Label::Positive)
                } else {
                    inst(-(i as f64), Label::Negative)
                }
            })
            .collect();
        let r = run_slice(&mut m, &rows, 7).unwrap();
        assert_eq!(r.counts.mistake_rate().unwrap(), 0.0);
        let seen: Vec<_> = r.trace.rows().iter().map(|t| t.samples_seen).collect();
        assert_eq!(seen, vec![7, 14, 21, 28, 35, 42, 49, 50]);
    }

    #[test]
    fn errors_propagate_and_zero_cadence_rejected() {
        let mut m = PaModel::new(PaVariant::Pa, 1.0, false).unwrap();
        let items = vec![Ok(inst(1.0, Label::Positive)), Err(Error::EmptyInput("boom"))];
        assert!(run_stream(&mut m, items, 1).is_err());
        assert!(run_slice(&mut m, &[], 0).is_err());
    }

    #[test]
    fn each_instance_pulled_once() {
        let pulls = Cell::new(0usize);
        let source = (0..100).map(|i| {
            pulls.set(pulls.get() + 1);
            Ok(inst(
                1.0 + i as f64,
                if i % 10 == 0 { Label::Positive } else { Label::Negative },
            ))
        });
        let mut m = PaModel::new(PaVariant::Pa, 1.0, true).unwrap();
        let r = run_stream(&mut m, source, 10).unwrap();
        assert_eq!(pulls.get(), 100);
        assert_eq!(r.counts.total(), 100);
    }
}
