//! Execution policy for the data-parallel kernels.
//!
//! With the `parallel` feature (default) the row-batched FFTs, pointwise
//! kernels and parameter sweeps run on the rayon pool. Without it, or when a
//! caller asks for [`Exec::Sequential`], the same code runs on the calling
//! thread. Results are identical either way: reductions are always performed
//! in index order after the parallel map.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Where a kernel runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

/// Caps the global worker pool from the `THREADS` environment variable.
///
/// Absent or unparsable values leave the hardware default in place. Calling
/// this twice is harmless; the second build request is ignored.
pub fn configure_threads_from_env() {
    #[cfg(feature = "parallel")]
    if let Some(n) = std::env::var("THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

/// Applies `f(chunk_index, chunk)` to consecutive `chunk`-sized pieces.
pub(crate) fn for_each_chunk<T, F>(exec: Exec, data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => data
            .par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(i, c)| f(i, c)),
        _ => data
            .chunks_mut(chunk)
            .enumerate()
            .for_each(|(i, c)| f(i, c)),
    }
}

/// Order-preserving map over a slice.
pub(crate) fn map<T, R, F>(exec: Exec, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

/// Order-preserving map over `0..n`.
pub(crate) fn map_range<R, F>(exec: Exec, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => (0..n).into_par_iter().map(f).collect(),
        _ => (0..n).map(f).collect(),
    }
}
