//! Index-ordered data-parallel maps.
//!
//! Every sample loop in the crate goes through [`map_indexed`], so results
//! are always collected in ascending index order. With the `parallel`
//! feature the work runs on the rayon pool; without it, or with
//! [`Execution::Sequential`], it runs on the calling thread. Both paths give
//! bit-identical output because each index derives its own RNG stream.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

/// Evaluates `f(0), ..., f(count - 1)` and returns the results in index order.
pub fn map_indexed<T, F>(exec: Execution, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        Execution::Sequential => (0..count).map(f).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..count).into_par_iter().map(f).collect(),
    }
}

/// Like [`map_indexed`] for fallible work; the error with the lowest index wins.
pub fn try_map_indexed<T, E, F>(exec: Execution, count: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    map_indexed(exec, count, f).into_iter().collect()
}

/// Max-reduction of a per-index defect, evaluated through [`map_indexed`].
pub fn max_indexed<F>(exec: Execution, count: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    map_indexed(exec, count, f).into_iter().fold(0.0, nan_max)
}

/// `max` that propagates NaN instead of discarding it.
pub(crate) fn nan_max(acc: f64, v: f64) -> f64 {
    if acc.is_nan() || v.is_nan() {
        f64::NAN
    } else {
        acc.max(v)
    }
}
