//! Data-parallel point scans, gated behind the `parallel` feature so the
//! crate also builds for single-threaded targets. Results are always
//! identical to the sequential scan; only wall time changes.

/// Below this many items the split overhead outweighs the win.
#[cfg(feature = "parallel")]
const PARALLEL_CUTOFF: usize = 4096;

#[cfg(feature = "parallel")]
pub(crate) fn any_index<F>(n: usize, pred: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    use rayon::prelude::*;
    if n < PARALLEL_CUTOFF {
        (0..n).any(pred)
    } else {
        (0..n).into_par_iter().any(pred)
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn any_index<F>(n: usize, pred: F) -> bool
where
    F: Fn(usize) -> bool,
{
    (0..n).any(pred)
}
