use std::io::Write;
use std::time::Duration;

use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct WorkerTiming {
    pub worker_id: usize,
    pub wall_clock: Duration,
    /// Synchronised rounds the worker took part in.
    pub outer_iterations: usize,
    /// Local solver iterations summed over all rounds.
    pub inner_iterations: usize,
}

/// Per-worker wall-clock and iteration counts for one distributed run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainingTimeReport {
    pub workers: Vec<WorkerTiming>,
    pub total: Duration,
}

impl TrainingTimeReport {
    /// The slowest worker bounds the run.
    pub fn max_worker_time(&self) -> Duration {
        self.workers.iter().map(|w| w.wall_clock).max().unwrap_or_default()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "worker,seconds,outer_iterations,inner_iterations")?;
        for w in &self.workers {
            writeln!(
                out,
                "{},{:.6},{},{}",
                w.worker_id,
                w.wall_clock.as_secs_f64(),
                w.outer_iterations,
                w.inner_iterations
            )?;
        }
        let outer = self.workers.iter().map(|w| w.outer_iterations).max().unwrap_or(0);
        let inner: usize = self.workers.iter().map(|w| w.inner_iterations).sum();
        writeln!(out, "all,{:.6},{outer},{inner}", self.total.as_secs_f64())?;
        Ok(())
    }
}
