//! Condensed-tree construction and excess-of-mass flat-cluster selection.
//!
//! The dendrogram is condensed under a minimum cluster size: walking each
//! component top-down, a split whose two sides both hold at least
//! `min_cluster_size` leaves creates two child clusters; a side below the
//! minimum sheds its leaves as points falling out of the current cluster; the
//! cluster itself continues along the surviving side. Association strength is
//! `lambda = 1/d` (with `d = 0` clamped, so duplicate hyperedges stay finite).
//!
//! A cluster's stability is the mass its members accumulate past its birth:
//! `sum(lambda_leave - lambda_birth)` over falling-out points plus
//! `size * (lambda_split - lambda_birth)` over child splits. Selection keeps
//! the antichain of clusters maximizing total stability, preferring deeper
//! clusters on exact ties, and (by default) never selecting a per-component
//! root. Hyperedges under no selected cluster are outliers.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hierarchy::{maximum_spanning_forest, single_linkage, Dendrogram};
use crate::hypergraph::TemporalHypergraph;
use crate::linegraph::{
    build_line_graph, connected_components_with_threshold, ComponentSummary, LineGraphParams,
    WeightedLineGraph, LARGE_COMPONENT_THRESHOLD,
};
use crate::similarity::{SimilarityKind, TimeKernelParams};

/// Distances of exactly zero (weight 1 pairs) are clamped here before
/// inversion, keeping lambda finite without perturbing any ordering.
pub const DISTANCE_CLAMP: f64 = 1e-12;

#[inline]
fn lambda_of(distance: f64) -> f64 {
    1.0 / distance.max(DISTANCE_CLAMP)
}

/// A child cluster split off `parent` at `lambda`, carrying `size` leaves.
#[derive(Clone, Copy, Debug)]
pub struct ChildSplit {
    pub cluster: u32,
    pub lambda: f64,
    pub size: u32,
}

/// One cluster of the condensed tree.
#[derive(Clone, Debug)]
pub struct CondensedCluster {
    /// `None` for per-component roots.
    pub parent: Option<u32>,
    /// Lambda at which this cluster appeared (0 for roots).
    pub birth_lambda: f64,
    /// Leaves under the cluster at birth.
    pub size: u32,
    /// Points that fell out of this cluster, with their leave lambda.
    pub points: Vec<(u32, f64)>,
    pub children: Vec<ChildSplit>,
}

/// Dendrogram condensed under a minimum cluster size.
#[derive(Clone, Debug)]
pub struct CondensedTree {
    /// Parents precede children; roots come first in component order.
    pub clusters: Vec<CondensedCluster>,
    pub min_cluster_size: usize,
    pub leaf_count: usize,
}

/// Condenses each component's hierarchy top-down. Components with a single
/// leaf produce no cluster; larger components produce a root cluster whose
/// points fall out as soon as no side of a split reaches
/// `min_cluster_size`.
pub fn condense(dend: &Dendrogram, min_cluster_size: usize) -> Result<CondensedTree> {
    if min_cluster_size < 2 {
        return Err(Error::Parameter(format!(
            "min cluster size must be at least 2, got {min_cluster_size}"
        )));
    }
    let mcs = min_cluster_size as u32;
    let mut clusters: Vec<CondensedCluster> = Vec::new();
    let mut queue: VecDeque<(u32, u32)> = VecDeque::new();

    for root in dend.roots() {
        if dend.subtree_size(root) < 2 {
            continue;
        }
        let id = clusters.len() as u32;
        clusters.push(CondensedCluster {
            parent: None,
            birth_lambda: 0.0,
            size: dend.subtree_size(root),
            points: Vec::new(),
            children: Vec::new(),
        });
        queue.push_back((root, id));
    }

    while let Some((start, cid)) = queue.pop_front() {
        let mut node = start;
        loop {
            let (a, b) = dend.children(node);
            let lambda = lambda_of(dend.distance(node));
            let (sa, sb) = (dend.subtree_size(a), dend.subtree_size(b));
            match (sa >= mcs, sb >= mcs) {
                (true, true) => {
                    for (child_node, size) in [(a, sa), (b, sb)] {
                        let child_id = clusters.len() as u32;
                        clusters.push(CondensedCluster {
                            parent: Some(cid),
                            birth_lambda: lambda,
                            size,
                            points: Vec::new(),
                            children: Vec::new(),
                        });
                        clusters[cid as usize].children.push(ChildSplit {
                            cluster: child_id,
                            lambda,
                            size,
                        });
                        queue.push_back((child_node, child_id));
                    }
                    break;
                }
                (true, false) => {
                    shed_points(dend, b, lambda, &mut clusters[cid as usize].points);
                    node = a;
                }
                (false, true) => {
                    shed_points(dend, a, lambda, &mut clusters[cid as usize].points);
                    node = b;
                }
                (false, false) => {
                    shed_points(dend, a, lambda, &mut clusters[cid as usize].points);
                    shed_points(dend, b, lambda, &mut clusters[cid as usize].points);
                    break;
                }
            }
        }
    }

    Ok(CondensedTree {
        clusters,
        min_cluster_size,
        leaf_count: dend.leaf_count,
    })
}

/// Records every leaf under `node` as a point leaving at `lambda`.
fn shed_points(dend: &Dendrogram, node: u32, lambda: f64, out: &mut Vec<(u32, f64)>) {
    let mut stack = vec![node];
    while let Some(n) = stack.pop() {
        if (n as usize) < dend.leaf_count {
            out.push((n, lambda));
        } else {
            let (a, b) = dend.children(n);
            stack.push(b);
            stack.push(a);
        }
    }
}

/// Excess of mass of one condensed cluster; non-negative.
pub fn stability(tree: &CondensedTree, cluster: u32) -> f64 {
    let c = &tree.clusters[cluster as usize];
    let points: f64 = c.points.iter().map(|&(_, l)| l - c.birth_lambda).sum();
    let splits: f64 = c
        .children
        .iter()
        .map(|ch| ch.size as f64 * (ch.lambda - c.birth_lambda))
        .sum();
    points + splits
}

/// Summary of one selected cluster.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ClusterInfo {
    pub id: u32,
    pub size: u32,
    pub stability: f64,
}

/// Flat labeling of hyperedges; `None` marks outliers.
#[derive(Clone, Debug)]
pub struct Clustering {
    pub labels: Vec<Option<u32>>,
    /// One entry per selected cluster, id-ordered.
    pub clusters: Vec<ClusterInfo>,
    /// Extraction parameters when produced by [`extract`].
    pub meta: Option<ExtractParams>,
}

impl Clustering {
    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    pub fn outlier_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_none()).count()
    }

    pub fn outlier_fraction(&self) -> f64 {
        if self.labels.is_empty() {
            0.0
        } else {
            self.outlier_count() as f64 / self.labels.len() as f64
        }
    }

    /// Rebuilds a clustering from stored labels (e.g. a labels file).
    /// Stabilities are unknown and set to NaN.
    pub fn from_labels(labels: Vec<Option<u32>>) -> Result<Self> {
        let mut sizes: Vec<u32> = Vec::new();
        for l in labels.iter().flatten() {
            let idx = *l as usize;
            if idx >= sizes.len() {
                sizes.resize(idx + 1, 0);
            }
            sizes[idx] += 1;
        }
        if let Some(empty) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::Parameter(format!(
                "cluster labels are not dense: no member has label {empty}"
            )));
        }
        let clusters = sizes
            .into_iter()
            .enumerate()
            .map(|(id, size)| ClusterInfo {
                id: id as u32,
                size,
                stability: f64::NAN,
            })
            .collect();
        Ok(Clustering {
            labels,
            clusters,
            meta: None,
        })
    }
}

/// Selects the maximum-total-stability antichain of the condensed tree.
///
/// Bottom-up, a cluster wins iff its own stability strictly exceeds the best
/// total of its descendants (exact ties go to the descendants, yielding finer
/// clusters). Per-component roots are only eligible when `allow_single_root`
/// is set, and even then only at `min_cluster_size` or above.
pub fn excess_of_mass(tree: &CondensedTree, allow_single_root: bool) -> Clustering {
    let k = tree.clusters.len();
    let stabilities: Vec<f64> = (0..k as u32).map(|c| stability(tree, c)).collect();
    let mut best = vec![0.0f64; k];
    let mut chosen = vec![false; k];
    for c in (0..k).rev() {
        let cluster = &tree.clusters[c];
        let child_sum: f64 = cluster
            .children
            .iter()
            .map(|ch| best[ch.cluster as usize])
            .sum();
        let selectable = cluster.parent.is_some()
            || (allow_single_root && cluster.size as usize >= tree.min_cluster_size);
        if selectable && stabilities[c] > child_sum {
            chosen[c] = true;
            best[c] = stabilities[c];
        } else {
            best[c] = child_sum;
        }
    }

    // Top-down: the shallowest chosen cluster on each root path wins.
    let mut selected: Vec<u32> = Vec::new();
    let mut stack: Vec<u32> = (0..k as u32)
        .filter(|&c| tree.clusters[c as usize].parent.is_none())
        .rev()
        .collect();
    while let Some(c) = stack.pop() {
        if chosen[c as usize] {
            selected.push(c);
        } else {
            for ch in tree.clusters[c as usize].children.iter().rev() {
                stack.push(ch.cluster);
            }
        }
    }
    selected.sort_unstable();

    let mut labels: Vec<Option<u32>> = vec![None; tree.leaf_count];
    let mut clusters = Vec::with_capacity(selected.len());
    for (dense, &c) in selected.iter().enumerate() {
        let mut size = 0u32;
        let mut stack = vec![c];
        while let Some(sc) = stack.pop() {
            let cluster = &tree.clusters[sc as usize];
            for &(p, _) in &cluster.points {
                labels[p as usize] = Some(dense as u32);
                size += 1;
            }
            for ch in &cluster.children {
                stack.push(ch.cluster);
            }
        }
        debug_assert_eq!(size, tree.clusters[c as usize].size);
        clusters.push(ClusterInfo {
            id: dense as u32,
            size,
            stability: stabilities[c as usize],
        });
    }
    Clustering {
        labels,
        clusters,
        meta: None,
    }
}

/// End-to-end extraction parameters.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExtractParams {
    pub sigma: f64,
    pub similarity: SimilarityKind,
    pub min_cluster_size: usize,
    pub allow_single_root: bool,
    pub max_vertex_degree: Option<usize>,
}

impl ExtractParams {
    pub fn new(sigma: f64, similarity: SimilarityKind, min_cluster_size: usize) -> Result<Self> {
        TimeKernelParams::new(sigma)?;
        similarity.validate()?;
        if min_cluster_size < 2 {
            return Err(Error::Parameter(format!(
                "min cluster size must be at least 2, got {min_cluster_size}"
            )));
        }
        Ok(ExtractParams {
            sigma,
            similarity,
            min_cluster_size,
            allow_single_root: false,
            max_vertex_degree: None,
        })
    }

    pub fn with_allow_single_root(mut self, allow: bool) -> Self {
        self.allow_single_root = allow;
        self
    }

    pub fn with_max_vertex_degree(mut self, cap: Option<usize>) -> Self {
        self.max_vertex_degree = cap;
        self
    }

    fn line_graph_params(&self) -> LineGraphParams {
        LineGraphParams {
            sigma: self.sigma,
            similarity: self.similarity,
            max_vertex_degree: self.max_vertex_degree,
        }
    }
}

/// Everything the pipeline produced on the way to the flat clustering.
#[derive(Clone, Debug)]
pub struct ExtractArtifacts {
    pub line_graph: WeightedLineGraph,
    pub components: ComponentSummary,
    pub forest: crate::hierarchy::SpanningForest,
    pub dendrogram: Dendrogram,
    pub condensed: CondensedTree,
    pub clustering: Clustering,
}

/// Full pipeline: line graph → maximum spanning forest → single linkage →
/// condense → excess of mass. Hyperedges isolated in the line graph come out
/// as outliers.
pub fn extract_full(
    h: &TemporalHypergraph,
    params: &ExtractParams,
    component_threshold: usize,
) -> Result<ExtractArtifacts> {
    let line_graph = build_line_graph(h, &params.line_graph_params())?;
    let components = connected_components_with_threshold(&line_graph, component_threshold);
    let forest = maximum_spanning_forest(&line_graph);
    let dendrogram = single_linkage(&forest);
    let condensed = condense(&dendrogram, params.min_cluster_size)?;
    let mut clustering = excess_of_mass(&condensed, params.allow_single_root);
    clustering.meta = Some(*params);
    Ok(ExtractArtifacts {
        line_graph,
        components,
        forest,
        dendrogram,
        condensed,
        clustering,
    })
}

/// See [`extract_full`]; returns only the flat clustering.
pub fn extract(h: &TemporalHypergraph, params: &ExtractParams) -> Result<Clustering> {
    Ok(extract_full(h, params, LARGE_COMPONENT_THRESHOLD)?.clustering)
}
