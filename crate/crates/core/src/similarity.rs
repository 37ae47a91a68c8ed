//! Structural similarities between hyperedges, the time kernel, and the
//! combined edge weight of the line graph.
//!
//! All member-set functions expect sorted, deduplicated slices (the
//! representation [`crate::hypergraph::Hyperedge`] maintains) and are
//! symmetric in their two arguments.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::VertexId;

/// Which structural similarity weighs the line graph.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SimilarityKind {
    /// Jaccard index of the member sets.
    Jaccard,
    /// 1 when one member set contains the other, else 0.
    Simplicial,
    /// Jaccard gated by a size filter: nonzero only when
    /// `min_size * slack_ratio + slack_offset >= max_size`.
    SizeFiltered { slack_ratio: f64, slack_offset: f64 },
}

pub const DEFAULT_SLACK_RATIO: f64 = 1.1;
pub const DEFAULT_SLACK_OFFSET: f64 = 2.0;

impl SimilarityKind {
    /// The size filter with its stock parameters (110% + 2).
    pub fn size_filtered_default() -> Self {
        SimilarityKind::SizeFiltered {
            slack_ratio: DEFAULT_SLACK_RATIO,
            slack_offset: DEFAULT_SLACK_OFFSET,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let SimilarityKind::SizeFiltered {
            slack_ratio,
            slack_offset,
        } = *self
        {
            if !slack_ratio.is_finite() || slack_ratio < 1.0 {
                return Err(Error::Parameter(format!(
                    "slack ratio must be >= 1, got {slack_ratio}"
                )));
            }
            if !slack_offset.is_finite() || slack_offset < 0.0 {
                return Err(Error::Parameter(format!(
                    "slack offset must be >= 0, got {slack_offset}"
                )));
            }
        }
        Ok(())
    }

    /// Similarity of two non-empty sorted member sets; panics are avoided by
    /// the line-graph builder which never feeds empty sets.
    #[inline]
    pub(crate) fn evaluate_unchecked(&self, a: &[VertexId], b: &[VertexId]) -> f64 {
        match *self {
            SimilarityKind::Jaccard => jaccard_sorted(a, b),
            SimilarityKind::Simplicial => simplicial_sorted(a, b),
            SimilarityKind::SizeFiltered {
                slack_ratio,
                slack_offset,
            } => size_filtered_sorted(a, b, slack_ratio, slack_offset),
        }
    }
}

impl std::str::FromStr for SimilarityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jaccard" => Ok(SimilarityKind::Jaccard),
            "simplicial" => Ok(SimilarityKind::Simplicial),
            "size-filtered" | "size_filtered" => Ok(SimilarityKind::size_filtered_default()),
            other => Err(Error::Parameter(format!(
                "unknown similarity {other:?} (expected jaccard, simplicial, size-filtered)"
            ))),
        }
    }
}

/// Width of the time kernel, in the unit of the edge times.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TimeKernelParams {
    sigma: f64,
}

impl TimeKernelParams {
    pub fn new(sigma: f64) -> Result<Self> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::Parameter(format!(
                "sigma must be a positive real, got {sigma}"
            )));
        }
        Ok(TimeKernelParams { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

#[inline]
fn intersection_size(a: &[VertexId], b: &[VertexId]) -> usize {
    let mut n = 0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

fn check_non_empty(a: &[VertexId], b: &[VertexId]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Parameter(
            "similarity of an empty member set is undefined".into(),
        ));
    }
    Ok(())
}

#[inline]
fn jaccard_sorted(a: &[VertexId], b: &[VertexId]) -> f64 {
    let inter = intersection_size(a, b);
    let union = a.len() + b.len() - inter;
    inter as f64 / union as f64
}

#[inline]
fn simplicial_sorted(a: &[VertexId], b: &[VertexId]) -> f64 {
    if intersection_size(a, b) == a.len().min(b.len()) {
        1.0
    } else {
        0.0
    }
}

#[inline]
fn size_filter_passes(small: usize, large: usize, ratio: f64, offset: f64) -> bool {
    if ratio == DEFAULT_SLACK_RATIO && offset == DEFAULT_SLACK_OFFSET {
        // Exact integer form of small*1.1 + 2 >= large, immune to float
        // boundary flips.
        (small as u64) * 11 + 20 >= (large as u64) * 10
    } else {
        small as f64 * ratio + offset >= large as f64
    }
}

#[inline]
fn size_filtered_sorted(a: &[VertexId], b: &[VertexId], ratio: f64, offset: f64) -> f64 {
    let small = a.len().min(b.len());
    let large = a.len().max(b.len());
    if size_filter_passes(small, large, ratio, offset) {
        jaccard_sorted(a, b)
    } else {
        0.0
    }
}

/// `|a ∩ b| / |a ∪ b|` for non-empty sorted member sets.
pub fn jaccard(a: &[VertexId], b: &[VertexId]) -> Result<f64> {
    check_non_empty(a, b)?;
    Ok(jaccard_sorted(a, b))
}

/// 1 when `a ⊆ b` or `b ⊆ a`, else 0.
pub fn simplicial(a: &[VertexId], b: &[VertexId]) -> Result<f64> {
    check_non_empty(a, b)?;
    Ok(simplicial_sorted(a, b))
}

/// Jaccard index when the sizes pass
/// `min*slack_ratio + slack_offset >= max` (boundary inclusive), else 0.
pub fn size_filtered(
    a: &[VertexId],
    b: &[VertexId],
    slack_ratio: f64,
    slack_offset: f64,
) -> Result<f64> {
    check_non_empty(a, b)?;
    SimilarityKind::SizeFiltered {
        slack_ratio,
        slack_offset,
    }
    .validate()?;
    Ok(size_filtered_sorted(a, b, slack_ratio, slack_offset))
}

/// Linear time kernel: `max(1 - |ti - tj| / sigma, 0)`.
///
/// A difference of exactly `sigma` gives 0, so the window of positive
/// similarity is the open interval `(-sigma, sigma)`.
#[inline]
pub fn time_kernel(ti: f64, tj: f64, sigma: f64) -> f64 {
    debug_assert!(sigma > 0.0);
    (1.0 - (ti - tj).abs() / sigma).max(0.0)
}

/// Geometric combination `sqrt(s * t)` of a structural and a time similarity.
#[inline]
pub fn combined_weight(s: f64, t: f64) -> f64 {
    (s * t).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ids(v: &[u32]) -> Vec<VertexId> {
        let mut v: Vec<VertexId> = v.iter().map(|&x| VertexId(x)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    const EPS: f64 = 1e-9;

    #[test]
    fn jaccard_values() {
        let (x, y, z) = (ids(&[0, 1, 2]), ids(&[0, 1]), ids(&[1, 2]));
        assert_eq!(jaccard(&x, &x).unwrap(), 1.0);
        assert_eq!(jaccard(&ids(&[0, 1]), &ids(&[5, 6])).unwrap(), 0.0);
        assert!((jaccard(&y, &z).unwrap() - 1.0 / 3.0).abs() < EPS);
        assert!(jaccard(&[], &x).is_err());
    }

    #[test]
    fn simplicial_values() {
        assert_eq!(simplicial(&ids(&[0]), &ids(&[0, 1, 2])).unwrap(), 1.0);
        assert_eq!(simplicial(&ids(&[0, 1]), &ids(&[0, 1])).unwrap(), 1.0);
        assert_eq!(simplicial(&ids(&[0, 1]), &ids(&[1, 2])).unwrap(), 0.0);
    }

    #[test]
    fn size_filter_boundary() {
        // |a|=10 subset of |b|=13: 10*1.1 + 2 = 13 >= 13 passes.
        let a = ids(&(0..10).collect::<Vec<_>>());
        let b = ids(&(0..13).collect::<Vec<_>>());
        let s = size_filtered(&a, &b, 1.1, 2.0).unwrap();
        assert!((s - 10.0 / 13.0).abs() < EPS);
        // |b|=14 fails: 13 < 14.
        let b14 = ids(&(0..14).collect::<Vec<_>>());
        assert_eq!(size_filtered(&a, &b14, 1.1, 2.0).unwrap(), 0.0);
        // Equal sets trivially pass.
        assert_eq!(size_filtered(&a, &a, 1.1, 2.0).unwrap(), 1.0);
    }

    #[test]
    fn size_filter_rejects_bad_params() {
        let a = ids(&[0]);
        assert!(size_filtered(&a, &a, 0.9, 2.0).is_err());
        assert!(size_filtered(&a, &a, 1.1, -1.0).is_err());
    }

    #[test]
    fn time_kernel_values() {
        assert_eq!(time_kernel(7.0, 7.0, 30.0), 1.0);
        assert_eq!(time_kernel(0.0, 45.0, 30.0), 0.0);
        assert!((time_kernel(0.0, 15.0, 30.0) - 0.5).abs() < EPS);
        // |dt| = sigma is exactly zero.
        assert_eq!(time_kernel(0.0, 30.0, 30.0), 0.0);
    }

    #[test]
    fn combined_weight_values() {
        assert_eq!(combined_weight(1.0, 1.0), 1.0);
        assert_eq!(combined_weight(0.7, 0.0), 0.0);
        assert!((combined_weight(1.0 / 3.0, 2.0 / 3.0) - (2.0f64 / 9.0).sqrt()).abs() < EPS);
    }

    #[test]
    fn sigma_validation() {
        assert!(TimeKernelParams::new(30.0).is_ok());
        assert!(TimeKernelParams::new(0.0).is_err());
        assert!(TimeKernelParams::new(-1.0).is_err());
        assert!(TimeKernelParams::new(f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn structural_similarities_are_symmetric_and_bounded(
            a in proptest::collection::vec(0u32..30, 1..8),
            b in proptest::collection::vec(0u32..30, 1..8),
        ) {
            let (a, b) = (ids(&a), ids(&b));
            for kind in [
                SimilarityKind::Jaccard,
                SimilarityKind::Simplicial,
                SimilarityKind::size_filtered_default(),
            ] {
                let ab = kind.evaluate_unchecked(&a, &b);
                let ba = kind.evaluate_unchecked(&b, &a);
                prop_assert_eq!(ab, ba);
                prop_assert!((0.0..=1.0).contains(&ab));
                prop_assert_eq!(kind.evaluate_unchecked(&a, &a), 1.0);
            }
            // The size filter can only shrink Jaccard.
            let j = jaccard(&a, &b).unwrap();
            let f = size_filtered(&a, &b, 1.1, 2.0).unwrap();
            prop_assert!(f <= j + 1e-15);
            // A simplicial pair realizes Jaccard = small/large.
            if simplicial(&a, &b).unwrap() == 1.0 {
                let expect = a.len().min(b.len()) as f64 / a.len().max(b.len()) as f64;
                prop_assert!((j - expect).abs() < 1e-12);
            }
        }

        #[test]
        fn combined_weight_behaviour(s in 0.0f64..=1.0, t in 0.0f64..=1.0) {
            let w = combined_weight(s, t);
            prop_assert!((0.0..=1.0).contains(&w));
            prop_assert_eq!(w == 0.0, s == 0.0 || t == 0.0);
            // Strictly increasing in each argument on (0,1].
            if s > 0.0 && t > 0.0 && s < 1.0 {
                prop_assert!(combined_weight(s + (1.0 - s) * 0.5, t) > w);
            }
        }
    }
}
