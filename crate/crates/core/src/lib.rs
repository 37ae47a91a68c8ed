//! Clustering the hyperedges of a temporal hypergraph.
//!
//! The pipeline builds a sparse weighted line graph over the hyperedges
//! (structural similarity of the member sets combined with a linear time
//! kernel), reduces it to a maximum spanning forest, replays the forest as a
//! single-linkage hierarchy, and extracts flat clusters with the excess-of-mass
//! rule under a minimum cluster size. Hyperedges that end up in no cluster are
//! outliers.
//!
//! ```
//! use hyperline_core::extraction::{extract, ExtractParams};
//! use hyperline_core::hypergraph::TemporalHypergraph;
//! use hyperline_core::similarity::SimilarityKind;
//!
//! let h = TemporalHypergraph::from_numeric(
//!     vec![vec![0, 1], vec![1, 2], vec![3, 4]],
//!     vec![0.0, 10.0, 5.0],
//!     None,
//! )
//! .unwrap();
//! let params = ExtractParams::new(30.0, SimilarityKind::Jaccard, 2).unwrap();
//! let clustering = extract(&h, &params).unwrap();
//! assert_eq!(clustering.labels.len(), 3);
//! ```
//!
//! With the default `parallel` feature the heavy stages (candidate pair
//! generation, weight evaluation, edge sorts) run on rayon; without it the
//! same code paths run sequentially. Either way the output is identical.

pub mod analysis;
pub mod error;
pub mod extraction;
pub mod hierarchy;
pub mod hypergraph;
pub mod linegraph;
pub(crate) mod parallel;
pub mod similarity;
pub mod synthetic;
pub mod union_find;

pub use error::{Error, Result};

/// Bounds the rayon worker pool used by the parallel code paths.
///
/// `None` keeps the rayon default (one worker per core). Calling this after
/// the pool is already running has no effect. Without the `parallel` feature
/// this is a no-op.
pub fn configure_thread_pool(workers: Option<usize>) {
    #[cfg(feature = "parallel")]
    if let Some(n) = workers {
        // Ignore AlreadyInitialized: the pool can only be sized once.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = workers;
}
