//! Multi-threaded snapshot sweeps for Parallel CHD.

use std::num::NonZeroUsize;

use hd_core::pchd::SnapshotSweep;

/// Splits the coordinates into contiguous chunks, one scoped thread each.
/// Every coordinate is computed by the same expression from the same
/// snapshot, so the output does not depend on `workers`.
#[derive(Debug, Clone, Copy)]
pub struct ThreadedSweep {
    workers: NonZeroUsize,
}

impl ThreadedSweep {
    pub fn new(workers: NonZeroUsize) -> Self {
        Self { workers }
    }

    /// One worker per available core.
    pub fn available() -> Self {
        Self::new(std::thread::available_parallelism().unwrap_or(NonZeroUsize::MIN))
    }

    pub fn workers(&self) -> usize {
        self.workers.get()
    }
}

impl SnapshotSweep for ThreadedSweep {
    fn fill(&self, update: &(dyn Fn(usize) -> f64 + Sync), out: &mut [f64]) {
        let workers = self.workers.get().min(out.len());
        if workers <= 1 {
            for (i, o) in out.iter_mut().enumerate() {
                *o = update(i);
            }
            return;
        }
        let chunk = out.len().div_ceil(workers);
        std::thread::scope(|s| {
            for (c, part) in out.chunks_mut(chunk).enumerate() {
                s.spawn(move || {
                    for (o, slot) in part.iter_mut().enumerate() {
                        *slot = update(c * chunk + o);
                    }
                });
            }
        });
    }
}
