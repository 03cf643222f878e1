//! Data-parallel helpers. With the `parallel` feature disabled every
//! strategy runs sequentially and results are identical either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How batch evaluations (time grids, design ensembles, integer boxes) run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Order-preserving map over a slice.
pub fn map<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

/// Order-preserving map over `0..n`.
pub fn map_range<R, F>(exec: Execution, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
        _ => (0..n).map(f).collect(),
    }
}

/// First `Some` in ascending order of `lo..=hi`; deterministic under both
/// strategies.
pub fn find_first<R, F>(exec: Execution, lo: i64, hi: i64, f: F) -> Option<R>
where
    R: Send,
    F: Fn(i64) -> Option<R> + Sync + Send,
{
    if lo > hi {
        return None;
    }
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => (lo..=hi).into_par_iter().find_map_first(f),
        _ => (lo..=hi).find_map(f),
    }
}
