//! Simulated multi-worker training.
//!
//! Workers run as scoped threads inside the process and talk only through an
//! [`AllreduceBus`]. Reductions sum in worker-index order, so every run is
//! deterministic given the partitioning.

mod bus;
mod cilsd;
mod dscil;
mod partition;
mod timing;

use std::io::Write;

pub use bus::{reduce_in_order, AllreduceBus};
pub use cilsd::{cilsd_train, CilsdConfig, CilsdResult};
pub use dscil::{dscil_train, AdmmScaling, ConsensusState, DscilConfig, DscilResult, Subsolver};
pub use partition::{partition_rows, WorkerPartition};
pub use timing::{TrainingTimeReport, WorkerTiming};

use crate::error::Result;

pub const HISTORY_HEADER: &str = "iteration,primal_residual,dual_residual,objective";

/// Writes per-iteration residuals and objective values.
pub fn write_history_csv<W: Write>(mut out: W, history: &[ConsensusState]) -> Result<()> {
    writeln!(out, "{HISTORY_HEADER}")?;
    for s in history {
        writeln!(
            out,
            "{},{:.12e},{:.12e},{:.12e}",
            s.iteration, s.primal_residual, s.dual_residual, s.objective
        )?;
    }
    Ok(())
}
