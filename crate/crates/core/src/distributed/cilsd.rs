//! Distributed FISTA: every worker holds the same iterate; per round the
//! partition gradients and loss sums are allreduced, scaled by `1/m`, and one
//! identical accelerated proximal step is taken everywhere.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::losses::{ClassWeights, CostPair};
use crate::optim::objective::{accumulate_rows, curvature_sum};
use crate::optim::{fista_core, FistaOptions, SolveReport, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::sparse::dimension_of;

use super::bus::AllreduceBus;
use super::partition::WorkerPartition;
use super::timing::{TrainingTimeReport, WorkerTiming};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CilsdConfig {
    pub lambda: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub costs: ClassWeights,
}

impl Default for CilsdConfig {
    fn default() -> Self {
        Self {
            lambda: 0.0,
            max_iter: DEFAULT_MAX_ITER,
            tol: DEFAULT_TOL,
            costs: CostPair::default().into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CilsdResult {
    pub w: Vec<f64>,
    pub report: SolveReport,
    pub timing: TrainingTimeReport,
}

pub fn cilsd_train(partitions: &[WorkerPartition], dim: usize, cfg: &CilsdConfig) -> Result<CilsdResult> {
    if partitions.is_empty() {
        return Err(Error::config("need at least one partition"));
    }
    let total_rows: usize = partitions.iter().map(|p| p.rows.len()).sum();
    if total_rows == 0 {
        return Err(Error::EmptyInput("no training rows"));
    }
    let dim = partitions.iter().map(|p| dimension_of(&p.rows)).fold(dim, usize::max);
    let bus = AllreduceBus::new(partitions.len());
    let start = Instant::now();

    let outcomes: Vec<(Result<SolveReport>, WorkerTiming)> = std::thread::scope(|s| {
        let handles: Vec<_> = partitions
            .iter()
            .enumerate()
            .map(|(k, part)| {
                let bus = &bus;
                s.spawn(move || run_worker(k, part, bus, dim, total_rows, cfg))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let total = start.elapsed();

    let mut workers = Vec::with_capacity(outcomes.len());
    let mut reports = Vec::with_capacity(outcomes.len());
    for (k, (report, timing)) in outcomes.into_iter().enumerate() {
        workers.push(timing);
        reports.push(report.map_err(|e| Error::Worker {
            worker: k,
            source: Box::new(e),
        })?);
    }
    let report = reports.swap_remove(0);
    Ok(CilsdResult {
        w: report.solution.clone(),
        report,
        timing: TrainingTimeReport { workers, total },
    })
}

fn run_worker(
    k: usize,
    part: &WorkerPartition,
    bus: &AllreduceBus,
    dim: usize,
    total_rows: usize,
    cfg: &CilsdConfig,
) -> (Result<SolveReport>, WorkerTiming) {
    let start = Instant::now();
    let m = total_rows as f64;

    let mut curvature = [curvature_sum(&part.rows, cfg.costs)];
    bus.allreduce_sum(k, &mut curvature);
    let lipschitz = curvature[0] / m;

    let mut buf = vec![0.0; dim + 1];
    let mut rounds = 0;
    let eval = |x: &[f64], grad: Option<&mut [f64]>| -> Result<f64> {
        rounds += 1;
        match grad {
            Some(g) => {
                buf.iter_mut().for_each(|v| *v = 0.0);
                buf[dim] = accumulate_rows(&part.rows, cfg.costs, x, Some(&mut buf[..dim]));
                bus.allreduce_sum(k, &mut buf);
                for (gj, s) in g.iter_mut().zip(&buf[..dim]) {
                    *gj = s / m;
                }
                Ok(buf[dim] / m)
            }
            None => {
                let mut loss = [accumulate_rows(&part.rows, cfg.costs, x, None)];
                bus.allreduce_sum(k, &mut loss);
                Ok(loss[0] / m)
            }
        }
    };
    let opts = FistaOptions {
        max_iter: cfg.max_iter,
        tol: cfg.tol,
        accelerate: true,
    };
    let report = fista_core(eval, lipschitz, cfg.lambda, &vec![0.0; dim], opts);
    let outer = report.as_ref().map_or(0, |r| r.iterations);
    let timing = WorkerTiming {
        worker_id: k,
        wall_clock: start.elapsed(),
        outer_iterations: outer,
        inner_iterations: rounds,
    };
    (report, timing)
}
