//! Replication scheduling. With the `parallel` feature replications run on
//! the rayon pool; without it (or with [`Execution::Sequential`]) they run
//! in order on the calling thread. Both paths return results indexed by
//! replication.

use serde::{Deserialize, Serialize};

/// Caps the number of worker threads used for replications.
pub const THREADS_ENV: &str = "NED_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    /// Whether this build can actually run replications concurrently.
    pub fn is_concurrent(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(count: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    match exec {
        Execution::Parallel => (0..count).into_par_iter().map(f).collect(),
        Execution::Sequential => (0..count).map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(count: usize, _exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..count).map(f).collect()
}

fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Runs `f`, inside a dedicated pool when `NED_THREADS` is set.
#[cfg(feature = "parallel")]
pub fn with_thread_cap<T: Send>(exec: Execution, f: impl FnOnce() -> T + Send) -> T {
    match (exec, thread_cap()) {
        (Execution::Parallel, Some(threads)) => match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_thread_cap<T: Send>(_exec: Execution, f: impl FnOnce() -> T + Send) -> T {
    let _ = thread_cap();
    f()
}
