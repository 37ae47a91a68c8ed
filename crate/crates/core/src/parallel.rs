//! Thin dispatch layer between rayon and sequential execution.
//!
//! Every caller passes an explicit `parallel` flag so the sequential path
//! stays compiled (and benchmarkable) even when the `parallel` feature is on.
//! Without the feature the flag is ignored and everything runs sequentially.

use std::cmp::Ordering;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub(crate) fn sort_unstable<T: Ord + Send>(v: &mut [T], parallel: bool) {
    #[cfg(feature = "parallel")]
    if parallel {
        v.par_sort_unstable();
        return;
    }
    let _ = parallel;
    v.sort_unstable();
}

pub(crate) fn sort_unstable_by<T, F>(v: &mut [T], parallel: bool, cmp: F)
where
    T: Send,
    F: Fn(&T, &T) -> Ordering + Sync,
{
    #[cfg(feature = "parallel")]
    if parallel {
        v.par_sort_unstable_by(cmp);
        return;
    }
    let _ = parallel;
    v.sort_unstable_by(cmp);
}

/// Order-preserving filter_map over an index range.
pub(crate) fn filter_map_indexed<T, F>(n: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        return (0..n).into_par_iter().filter_map(&f).collect();
    }
    let _ = parallel;
    (0..n).filter_map(f).collect()
}

/// Applies `f` to each chunk of `items`, concatenating the per-chunk output
/// vectors in chunk order.
pub(crate) fn flat_map_chunks<I, T, F>(
    items: &[I],
    chunk_size: usize,
    parallel: bool,
    f: F,
) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&[I]) -> Vec<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        return items
            .par_chunks(chunk_size.max(1))
            .flat_map_iter(&f)
            .collect();
    }
    let _ = parallel;
    items.chunks(chunk_size.max(1)).flat_map(f).collect()
}
