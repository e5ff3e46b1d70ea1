//! Data-parallel helpers with a sequential fallback.
//!
//! Every batch loop in the crate (λ grids, N sweeps, term assembly, row-wise
//! sparse products) goes through [`map`] or [`rows_mut`]. With the `parallel`
//! feature the work is spread over the rayon pool; without it, or when the
//! caller asks for [`Execution::Sequential`], the same closure runs in order.
//! Results are always returned in input order, so output is identical either
//! way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How a batch loop is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Rayon pool when the `parallel` feature is enabled, sequential otherwise.
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Order-preserving map over a slice.
pub fn map<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Fill `out[i] = f(i)` for every index.
pub fn rows_mut<R, F>(exec: Execution, out: &mut [R], f: F)
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    // Below this size the pool overhead dominates the row work.
    #[cfg(feature = "parallel")]
    const MIN_PARALLEL_ROWS: usize = 4096;

    #[cfg(feature = "parallel")]
    if exec.is_parallel() && out.len() >= MIN_PARALLEL_ROWS {
        out.par_iter_mut().enumerate().for_each(|(i, slot)| *slot = f(i));
        return;
    }
    let _ = exec;
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = f(i);
    }
}
