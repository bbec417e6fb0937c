//! Shard execution: data-parallel with rayon by default, sequential behind
//! the same interface when the `parallel` feature is off.
//!
//! Work is split into fixed-size shards derived from the replication count
//! alone — never from the thread count — and results are merged in shard
//! order, so output bytes are identical across thread counts and across the
//! parallel/sequential builds.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Replications per shard.
pub const SHARD_SIZE: u64 = 1 << 18;

/// Shard sizes covering `reps` exactly.
pub fn shard_counts(reps: u64) -> Vec<u64> {
    let full = reps / SHARD_SIZE;
    let rem = reps % SHARD_SIZE;
    let mut out = vec![SHARD_SIZE; full as usize];
    if rem > 0 {
        out.push(rem);
    }
    if out.is_empty() {
        out.push(0);
    }
    out
}

/// Sequential shard map; always available (benchmarks compare against it).
pub fn map_shards_seq<T, F>(count: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T + Sync,
    T: Send,
{
    (0..count).map(f).collect()
}

/// Parallel shard map (ordered collect).
#[cfg(feature = "parallel")]
pub fn map_shards_par<T, F>(count: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T + Send + Sync,
    T: Send,
{
    (0..count).into_par_iter().map(f).collect()
}

/// Shard map used by the estimators: parallel when built with the
/// `parallel` feature, sequential otherwise.
#[cfg(feature = "parallel")]
pub fn map_shards<T, F>(count: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T + Send + Sync,
    T: Send,
{
    map_shards_par(count, f)
}

#[cfg(not(feature = "parallel"))]
pub fn map_shards<T, F>(count: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T + Send + Sync,
    T: Send,
{
    map_shards_seq(count, f)
}

/// Cap the worker pool (first call wins; later calls are ignored).
pub fn configure_threads(jobs: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = jobs;
    }
}
