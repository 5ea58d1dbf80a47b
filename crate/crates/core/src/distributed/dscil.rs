//! Consensus ADMM over row partitions.
//!
//! Each worker `k` holds `w_k` and a scaled dual `u_k` and solves
//!
//! ```text
//! w_k = argmin (1/m) sum_{i in k} rho_i * smooth_hinge(y_i w.x_i) + (rho_admm/2) ||w - z + u_k||^2
//! ```
//!
//! with L-BFGS or random coordinate descent. The global variable is
//! `z = soft_threshold(mean(w) + mean(u), lambda / (rho_admm * n))` and the
//! duals step `u_k += w_k - z`.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::losses::{l1_norm, ClassWeights, CostPair};
use crate::optim::{lbfgs_minimize, rcd_minimize, soft_threshold_in_place, HingeObjective, LbfgsOptions, RcdOptions};
use crate::sparse::dimension_of;

use super::bus::AllreduceBus;
use super::partition::WorkerPartition;
use super::timing::{TrainingTimeReport, WorkerTiming};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsolver {
    Lbfgs,
    Rcd,
}

/// How the loss is scaled inside the ADMM split. Both give the same
/// minimizer; they differ in how strongly `rho_admm` couples the workers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdmmScaling {
    /// Workers own `(1/m) sum_{i in k} loss_i`; the z-shrinkage is
    /// `lambda / (rho_admm * n)`.
    Mean,
    /// Workers own `sum_{i in k} loss_i` and the regulariser becomes
    /// `m * lambda`; equivalent to `Mean` with `rho_admm / m`.
    Sum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DscilConfig {
    pub lambda: f64,
    pub rho_admm: f64,
    pub subsolver: Subsolver,
    pub max_iter: usize,
    pub eps_abs: f64,
    pub eps_rel: f64,
    pub costs: ClassWeights,
    /// Local solver tolerance (gradient sup-norm for L-BFGS, step size for RCD).
    pub sub_tol: f64,
    /// Local solver budget (iterations for L-BFGS, epochs for RCD).
    pub sub_max_iter: usize,
    pub seed: u64,
    pub scaling: AdmmScaling,
}

impl Default for DscilConfig {
    fn default() -> Self {
        Self {
            lambda: 0.0,
            rho_admm: 1.0,
            subsolver: Subsolver::Lbfgs,
            max_iter: 1000,
            eps_abs: 1e-6,
            eps_rel: 1e-4,
            costs: CostPair::default().into(),
            sub_tol: 1e-8,
            sub_max_iter: 1000,
            seed: 0,
            scaling: AdmmScaling::Sum,
        }
    }
}

/// Global state after one ADMM round.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusState {
    pub iteration: usize,
    pub z: Vec<f64>,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub eps_primal: f64,
    pub eps_dual: f64,
    /// Full regularised objective at `z`.
    pub objective: f64,
}

#[derive(Debug, Clone)]
pub struct DscilResult {
    /// The consensus weights `z`.
    pub w: Vec<f64>,
    pub history: Vec<ConsensusState>,
    pub converged: bool,
    pub timing: TrainingTimeReport,
}

impl DscilResult {
    pub fn iterations(&self) -> usize {
        self.history.len()
    }
}

struct WorkerOutcome {
    history: Vec<ConsensusState>,
    converged: bool,
    timing: WorkerTiming,
}

/// Trains on `partitions`, leaving each worker's final `w_local`/`u_dual` in
/// place. `dim` is a lower bound on the weight dimension.
pub fn dscil_train(partitions: &mut [WorkerPartition], dim: usize, cfg: &DscilConfig) -> Result<DscilResult> {
    validate(cfg)?;
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

    let outcomes: Vec<Result<Option<WorkerOutcome>>> = std::thread::scope(|s| {
        let handles: Vec<_> = partitions
            .iter_mut()
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
    let mut lead: Option<WorkerOutcome> = None;
    let mut first_error = None;
    for (k, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(Some(o)) => {
                workers.push(o.timing.clone());
                if k == 0 {
                    lead = Some(o);
                }
            }
            Ok(None) => {}
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    if let Some(e) = first_error {
        return Err(e);
    }
    let lead = lead.ok_or_else(|| Error::config("worker 0 produced no result"))?;
    let w = lead
        .history
        .last()
        .map(|s| s.z.clone())
        .unwrap_or_else(|| vec![0.0; dim]);
    Ok(DscilResult {
        w,
        history: lead.history,
        converged: lead.converged,
        timing: TrainingTimeReport { workers, total },
    })
}

fn validate(cfg: &DscilConfig) -> Result<()> {
    if !(cfg.lambda >= 0.0 && cfg.lambda.is_finite()) {
        return Err(Error::config(format!("lambda must be >= 0, got {}", cfg.lambda)));
    }
    if !(cfg.rho_admm > 0.0 && cfg.rho_admm.is_finite()) {
        return Err(Error::config(format!(
            "rho_admm must be positive, got {}",
            cfg.rho_admm
        )));
    }
    if cfg.max_iter == 0 {
        return Err(Error::config("max_iter must be at least 1"));
    }
    Ok(())
}

fn run_worker(
    k: usize,
    part: &mut WorkerPartition,
    bus: &AllreduceBus,
    dim: usize,
    total_rows: usize,
    cfg: &DscilConfig,
) -> Result<Option<WorkerOutcome>> {
    let start = Instant::now();
    let n = bus.worker_count() as f64;
    let rho = cfg.rho_admm;
    let (loss_normalizer, reg) = match cfg.scaling {
        AdmmScaling::Mean => (total_rows, cfg.lambda),
        AdmmScaling::Sum => (1, cfg.lambda * total_rows as f64),
    };
    let kappa = reg / (rho * n);
    let sqrt_nd = (n * dim as f64).sqrt();

    part.w_local.resize(dim, 0.0);
    part.u_dual.resize(dim, 0.0);
    let mut local =
        HingeObjective::partial(&part.rows, cfg.costs, dim, loss_normalizer).with_proximal_term(rho, vec![0.0; dim]);

    let mut z = vec![0.0; dim];
    let mut anchor = vec![0.0; dim];
    let mut buf = vec![0.0; 2 * dim + 1];
    let mut history = Vec::new();
    let mut inner = 0;
    let mut converged = false;

    for it in 1..=cfg.max_iter {
        for ((a, zj), uj) in anchor.iter_mut().zip(&z).zip(&part.u_dual) {
            *a = zj - uj;
        }
        local.set_anchor(&anchor);
        let solved = match cfg.subsolver {
            Subsolver::Lbfgs => lbfgs_minimize(
                &local,
                &part.w_local,
                LbfgsOptions {
                    tol: cfg.sub_tol,
                    max_iter: cfg.sub_max_iter,
                    ..Default::default()
                },
            ),
            Subsolver::Rcd => rcd_minimize(
                &local,
                &part.w_local,
                RcdOptions {
                    tol: cfg.sub_tol,
                    max_epochs: cfg.sub_max_iter,
                    seed: cfg.seed ^ ((k as u64) << 32) ^ it as u64,
                },
            ),
        };

        // Stack [w_k, u_k, failed] so a local failure stops every worker in
        // the same round instead of leaving them blocked on the bus.
        let failure = match solved {
            Ok(report) => {
                inner += report.iterations;
                part.w_local = report.solution;
                buf[..dim].copy_from_slice(&part.w_local);
                buf[dim..2 * dim].copy_from_slice(&part.u_dual);
                buf[2 * dim] = 0.0;
                None
            }
            Err(e) => {
                buf.iter_mut().for_each(|v| *v = 0.0);
                buf[2 * dim] = 1.0;
                Some(e)
            }
        };
        bus.allreduce_sum(k, &mut buf);
        if let Some(e) = failure {
            return Err(Error::Worker {
                worker: k,
                source: Box::new(e),
            });
        }
        if buf[2 * dim] > 0.0 {
            // Another worker failed and reports the error.
            return Ok(None);
        }

        let z_old = std::mem::take(&mut z);
        z = buf[..dim]
            .iter()
            .zip(&buf[dim..2 * dim])
            .map(|(w, u)| (w + u) / n)
            .collect();
        soft_threshold_in_place(&mut z, kappa);
        for ((u, w), zj) in part.u_dual.iter_mut().zip(&part.w_local).zip(&z) {
            *u += w - zj;
        }

        let mut scalars = [
            part.w_local
                .iter()
                .zip(&z)
                .map(|(w, zj)| (w - zj) * (w - zj))
                .sum::<f64>(),
            part.w_local.iter().map(|w| w * w).sum::<f64>(),
            part.u_dual.iter().map(|u| u * u).sum::<f64>(),
            local.accumulate(&z, None),
        ];
        bus.allreduce_sum(k, &mut scalars);

        let primal = scalars[0].sqrt();
        let z_step = z.iter().zip(&z_old).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let dual = rho * n.sqrt() * z_step;
        let z_norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        let eps_primal = sqrt_nd * cfg.eps_abs + cfg.eps_rel * scalars[1].sqrt().max(n.sqrt() * z_norm);
        let eps_dual = sqrt_nd * cfg.eps_abs + cfg.eps_rel * rho * scalars[2].sqrt();
        let objective = scalars[3] / total_rows as f64 + cfg.lambda * l1_norm(&z);
        if !objective.is_finite() {
            return Err(Error::Worker {
                worker: k,
                source: Box::new(Error::Divergence { iteration: it }),
            });
        }

        history.push(ConsensusState {
            iteration: it,
            z: z.clone(),
            primal_residual: primal,
            dual_residual: dual,
            eps_primal,
            eps_dual,
            objective,
        });
        if primal <= eps_primal && dual <= eps_dual {
            converged = true;
            break;
        }
    }

    Ok(Some(WorkerOutcome {
        timing: WorkerTiming {
            worker_id: k,
            wall_clock: start.elapsed(),
            outer_iterations: history.len(),
            inner_iterations: inner,
        },
        history,
        converged,
    }))
}
