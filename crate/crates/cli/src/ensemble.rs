//! Parallel ensemble execution on a fixed-size worker pool.

use std::sync::atomic::{AtomicUsize, Ordering};

use anyhow::Context;
use entcool_core::cooling::{run_trajectory, CoolingConfig, EnsembleResult};
use entcool_core::{Error, StateVector};
use rayon::prelude::*;

use crate::progress::{Progress, ProgressEvent};

pub fn thread_pool(workers: usize) -> anyhow::Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .thread_name(|i| format!("entcool-worker-{i}"))
        .build()
        .context("building worker pool")
}

/// Runs the `config.n_trajectories` trajectories of `config` on `pool`.
///
/// Every trajectory draws from its own `(base_seed, index)` stream and the
/// records are reassembled in index order, so the result is the same for any
/// pool size.
pub fn run_parallel(
    pool: &rayon::ThreadPool,
    initial: &StateVector,
    config: &CoolingConfig,
    task: &str,
    progress: &Progress,
) -> entcool_core::Result<EnsembleResult> {
    config.validate()?;
    let total = config.n_trajectories;
    let completed = AtomicUsize::new(0);
    let records = pool.install(|| {
        (0..total)
            .into_par_iter()
            .map(|i| {
                let rec = run_trajectory(initial, config, i).map_err(|e| Error::Trajectory { index: i, cause: Box::new(e) })?;
                let done = completed.fetch_add(1, Ordering::Relaxed) + 1;
                progress.emit(&ProgressEvent::TrajectoryDone {
                    task: task.to_owned(),
                    index: i,
                    completed: done,
                    total,
                    accepted: rec.accepted_count,
                    final_entropy: *rec.entropy_trace.last().expect("trace holds the initial value"),
                });
                Ok(rec)
            })
            .collect::<entcool_core::Result<Vec<_>>>()
    })?;
    EnsembleResult::from_records(config.clone(), records)
}
