use std::sync::{Barrier, Mutex};

/// In-process stand-in for an MPI communicator supporting barrier and
/// sum-allreduce.
#[derive(Debug)]
pub struct AllreduceBus {
    workers: usize,
    slots: Mutex<Vec<Vec<f64>>>,
    barrier: Barrier,
}

impl AllreduceBus {
    /// Panics if `workers == 0`.
    pub fn new(workers: usize) -> Self {
        assert!(workers >= 1, "a bus needs at least one worker");
        Self {
            workers,
            slots: Mutex::new(vec![Vec::new(); workers]),
            barrier: Barrier::new(workers),
        }
    }

    pub fn worker_count(&self) -> usize {
        self.workers
    }

    pub fn barrier(&self) {
        self.barrier.wait();
    }

    /// Replaces `buf` on every worker with the elementwise sum of all workers'
    /// buffers, summed in worker-index order. All workers must call this with
    /// equal-length buffers.
    pub fn allreduce_sum(&self, worker: usize, buf: &mut [f64]) {
        {
            let mut slots = self.slots.lock().expect("bus poisoned");
            let slot = &mut slots[worker];
            slot.clear();
            slot.extend_from_slice(buf);
        }
        self.barrier.wait();
        {
            let slots = self.slots.lock().expect("bus poisoned");
            sum_into(&slots, buf);
        }
        // Nobody may overwrite a slot until everyone has read the sum.
        self.barrier.wait();
    }
}

fn sum_into(parts: &[Vec<f64>], out: &mut [f64]) {
    out.copy_from_slice(&parts[0]);
    for p in &parts[1..] {
        assert_eq!(p.len(), out.len(), "allreduce buffer length mismatch");
        for (o, v) in out.iter_mut().zip(p) {
            *o += v;
        }
    }
}

/// The sum [`AllreduceBus::allreduce_sum`] produces, computed sequentially.
pub fn reduce_in_order(parts: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; parts.first().map_or(0, Vec::len)];
    if !parts.is_empty() {
        sum_into(parts, &mut out);
    }
    out
}
