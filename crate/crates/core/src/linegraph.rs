//! Sparse weighted line-graph construction.
//!
//! Line-graph vertices are the hyperedges of the input. Candidate pairs come
//! from a sliding time window over each vertex's time-sorted incidence list,
//! so only pairs with `|t(i)-t(j)| < sigma` and at least one shared vertex
//! are ever considered — exactly the pairs that can carry nonzero weight.
//! Pair discovery is deduplicated per batch, then globally by sort-unique,
//! so the output is canonical regardless of worker count.

use std::collections::HashSet;

use crate::error::Result;
use crate::hypergraph::{EdgeId, TemporalHypergraph, VertexId};
use crate::parallel;
use crate::similarity::{combined_weight, time_kernel, SimilarityKind, TimeKernelParams};
use crate::union_find::UnionFind;

/// Vertices per candidate-generation batch; each batch deduplicates its own
/// pair discoveries before the global pass.
const VERTEX_BATCH: usize = 2048;

/// One weighted line-graph edge, `i < j`, `w` in (0, 1].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineEdge {
    pub i: EdgeId,
    pub j: EdgeId,
    pub w: f64,
}

/// Sparse symmetric weighted graph over hyperedge indices.
#[derive(Clone, Debug, Default)]
pub struct WeightedLineGraph {
    /// Equals the hyperedge count of the source hypergraph; isolated
    /// line-graph vertices are represented implicitly.
    pub vertex_count: usize,
    /// Sorted by (i, j); no duplicates, no self-loops, all weights > 0.
    pub edges: Vec<LineEdge>,
}

impl WeightedLineGraph {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

/// Construction parameters.
#[derive(Clone, Copy, Debug)]
pub struct LineGraphParams {
    pub sigma: f64,
    pub similarity: SimilarityKind,
    /// Skip candidate generation for vertices with more incident edges than
    /// this (operational guard; off by default). Pairs reachable only
    /// through skipped vertices are lost, which is logged.
    pub max_vertex_degree: Option<usize>,
}

impl LineGraphParams {
    pub fn new(sigma: f64, similarity: SimilarityKind) -> Result<Self> {
        TimeKernelParams::new(sigma)?;
        similarity.validate()?;
        Ok(LineGraphParams {
            sigma,
            similarity,
            max_vertex_degree: None,
        })
    }

    pub fn with_max_vertex_degree(mut self, cap: usize) -> Self {
        self.max_vertex_degree = Some(cap);
        self
    }
}

#[inline]
fn pack(i: EdgeId, j: EdgeId) -> u64 {
    ((i as u64) << 32) | j as u64
}

#[inline]
fn unpack(p: u64) -> (EdgeId, EdgeId) {
    ((p >> 32) as EdgeId, p as EdgeId)
}

fn collect_pairs(
    h: &TemporalHypergraph,
    sigma: f64,
    cap: Option<usize>,
    parallel: bool,
) -> Vec<u64> {
    let times: Vec<f64> = h.edges().iter().map(|e| e.time).collect();
    if let Some(cap) = cap {
        let over: Vec<u32> = (0..h.vertex_count() as u32)
            .filter(|&v| h.incidence(VertexId(v)).unwrap().len() > cap)
            .collect();
        if !over.is_empty() {
            log::warn!(
                "skipping candidate generation for {} vertices over the degree cap {}: {:?}",
                over.len(),
                cap,
                over
            );
        }
    }
    let vertices: Vec<u32> = (0..h.vertex_count() as u32).collect();
    let mut pairs = parallel::flat_map_chunks(&vertices, VERTEX_BATCH, parallel, |batch| {
        let mut seen: HashSet<u64> = HashSet::new();
        let mut out = Vec::new();
        for &v in batch {
            let list = h.incidence(VertexId(v)).unwrap();
            if cap.is_some_and(|c| list.len() > c) {
                continue;
            }
            let mut left = 0usize;
            for r in 0..list.len() {
                let tr = times[list[r] as usize];
                while tr - times[list[left] as usize] >= sigma {
                    left += 1;
                }
                for k in left..r {
                    let (a, b) = (list[k], list[r]);
                    let key = if a < b { pack(a, b) } else { pack(b, a) };
                    if seen.insert(key) {
                        out.push(key);
                    }
                }
            }
        }
        out
    });
    parallel::sort_unstable(&mut pairs, parallel);
    pairs.dedup();
    pairs
}

fn build(
    h: &TemporalHypergraph,
    params: &LineGraphParams,
    parallel: bool,
) -> Result<WeightedLineGraph> {
    TimeKernelParams::new(params.sigma)?;
    params.similarity.validate()?;
    let pairs = collect_pairs(h, params.sigma, params.max_vertex_degree, parallel);
    let edges = parallel::filter_map_indexed(pairs.len(), parallel, |idx| {
        let (i, j) = unpack(pairs[idx]);
        let (a, b) = (h.edge(i), h.edge(j));
        let s = params.similarity.evaluate_unchecked(&a.members, &b.members);
        if s <= 0.0 {
            return None;
        }
        let t = time_kernel(a.time, b.time, params.sigma);
        let w = combined_weight(s, t);
        (w > 0.0).then_some(LineEdge { i, j, w })
    });
    Ok(WeightedLineGraph {
        vertex_count: h.edge_count(),
        edges,
    })
}

/// All pairs `(i, j)`, `i < j`, with `|t(i) - t(j)| < sigma` and a shared
/// vertex, sorted, each exactly once.
pub fn candidate_pairs(h: &TemporalHypergraph, sigma: f64) -> Result<Vec<(EdgeId, EdgeId)>> {
    TimeKernelParams::new(sigma)?;
    Ok(collect_pairs(h, sigma, None, true)
        .into_iter()
        .map(unpack)
        .collect())
}

/// Builds the weighted line graph; pairs whose combined weight is zero
/// (structural similarity 0, or filtered) are dropped.
pub fn build_line_graph(
    h: &TemporalHypergraph,
    params: &LineGraphParams,
) -> Result<WeightedLineGraph> {
    build(h, params, true)
}

/// Sequential construction; identical output to [`build_line_graph`].
pub fn build_line_graph_seq(
    h: &TemporalHypergraph,
    params: &LineGraphParams,
) -> Result<WeightedLineGraph> {
    build(h, params, false)
}

/// Default size from which a component counts as large.
pub const LARGE_COMPONENT_THRESHOLD: usize = 10;

/// Connected-component labeling of the line graph.
#[derive(Clone, Debug)]
pub struct ComponentSummary {
    pub component_count: usize,
    pub large_component_count: usize,
    pub threshold: usize,
    /// Dense component id per line-graph vertex, numbered by first
    /// occurrence in vertex order.
    pub component_ids: Vec<u32>,
}

pub fn connected_components(lg: &WeightedLineGraph) -> ComponentSummary {
    connected_components_with_threshold(lg, LARGE_COMPONENT_THRESHOLD)
}

pub fn connected_components_with_threshold(
    lg: &WeightedLineGraph,
    threshold: usize,
) -> ComponentSummary {
    let n = lg.vertex_count;
    let mut uf = UnionFind::new(n);
    for e in &lg.edges {
        uf.union(e.i, e.j);
    }
    let mut root_label = vec![u32::MAX; n];
    let mut sizes: Vec<usize> = Vec::new();
    let mut component_ids = Vec::with_capacity(n);
    for v in 0..n as u32 {
        let root = uf.find(v) as usize;
        if root_label[root] == u32::MAX {
            root_label[root] = sizes.len() as u32;
            sizes.push(0);
        }
        let label = root_label[root];
        sizes[label as usize] += 1;
        component_ids.push(label);
    }
    let large_component_count = sizes.iter().filter(|&&s| s >= threshold).count();
    ComponentSummary {
        component_count: sizes.len(),
        large_component_count,
        threshold,
        component_ids,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::TemporalHypergraph;

    fn three_edge_graph() -> TemporalHypergraph {
        // e0={a,b}@0, e1={b,c}@10, e2={d,e}@5
        TemporalHypergraph::from_numeric(
            vec![vec![0, 1], vec![1, 2], vec![3, 4]],
            vec![0.0, 10.0, 5.0],
            None,
        )
        .unwrap()
    }

    #[test]
    fn candidates_need_shared_vertex_and_close_times() {
        let h = three_edge_graph();
        assert_eq!(candidate_pairs(&h, 30.0).unwrap(), vec![(0, 1)]);
        assert_eq!(candidate_pairs(&h, 5.0).unwrap(), Vec::new());
        let single =
            TemporalHypergraph::from_numeric(vec![vec![0, 1]], vec![0.0], None).unwrap();
        assert_eq!(candidate_pairs(&single, 30.0).unwrap(), Vec::new());
    }

    #[test]
    fn sigma_must_be_positive() {
        let h = three_edge_graph();
        assert!(candidate_pairs(&h, 0.0).is_err());
        assert!(LineGraphParams::new(-3.0, SimilarityKind::Jaccard).is_err());
    }

    #[test]
    fn jaccard_weight_of_adjacent_pair() {
        let h = three_edge_graph();
        let params = LineGraphParams::new(30.0, SimilarityKind::Jaccard).unwrap();
        let lg = build_line_graph(&h, &params).unwrap();
        assert_eq!(lg.vertex_count, 3);
        assert_eq!(lg.edge_count(), 1);
        let e = lg.edges[0];
        assert_eq!((e.i, e.j), (0, 1));
        assert!((e.w - (2.0f64 / 9.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn simplicial_drops_non_nested_pair() {
        let h = three_edge_graph();
        let params = LineGraphParams::new(30.0, SimilarityKind::Simplicial).unwrap();
        let lg = build_line_graph(&h, &params).unwrap();
        assert_eq!(lg.edge_count(), 0);
    }

    #[test]
    fn duplicate_edges_get_weight_one() {
        let h = TemporalHypergraph::from_numeric(
            vec![vec![0, 1, 2], vec![0, 1, 2]],
            vec![4.0, 4.0],
            None,
        )
        .unwrap();
        let params = LineGraphParams::new(30.0, SimilarityKind::Jaccard).unwrap();
        let lg = build_line_graph(&h, &params).unwrap();
        assert_eq!(lg.edge_count(), 1);
        assert_eq!(lg.edges[0].w, 1.0);
    }

    #[test]
    fn components_of_the_toy_graph() {
        let h = three_edge_graph();
        let params = LineGraphParams::new(30.0, SimilarityKind::Jaccard).unwrap();
        let lg = build_line_graph(&h, &params).unwrap();
        let c = connected_components(&lg);
        assert_eq!(c.component_count, 2);
        assert_eq!(c.large_component_count, 0);
        assert_eq!(c.component_ids, vec![0, 0, 1]);
    }

    #[test]
    fn edgeless_graph_is_all_singletons() {
        let lg = WeightedLineGraph {
            vertex_count: 7,
            edges: Vec::new(),
        };
        let c = connected_components(&lg);
        assert_eq!(c.component_count, 7);
        assert_eq!(c.large_component_count, 0);
    }

    #[test]
    fn chain_of_twelve_is_one_large_component() {
        let members: Vec<Vec<u32>> = (0..12).map(|i| vec![i, i + 1]).collect();
        let times: Vec<f64> = (0..12).map(|i| i as f64).collect();
        let h = TemporalHypergraph::from_numeric(members, times, None).unwrap();
        let params = LineGraphParams::new(100.0, SimilarityKind::Jaccard).unwrap();
        let lg = build_line_graph(&h, &params).unwrap();
        let c = connected_components(&lg);
        assert_eq!(c.component_count, 1);
        assert_eq!(c.large_component_count, 1);
    }

    #[test]
    fn adjacency_is_sorted_and_unique() {
        let h = crate::synthetic::random_hypergraph(60, 12, (1, 5), (0.0, 50.0), 99);
        let params = LineGraphParams::new(20.0, SimilarityKind::Jaccard).unwrap();
        let lg = build_line_graph(&h, &params).unwrap();
        for win in lg.edges.windows(2) {
            assert!((win[0].i, win[0].j) < (win[1].i, win[1].j));
        }
        for e in &lg.edges {
            assert!(e.i < e.j);
            assert!(e.w > 0.0 && e.w <= 1.0);
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let h = crate::synthetic::random_hypergraph(120, 15, (1, 6), (0.0, 100.0), 7);
        for kind in [
            SimilarityKind::Jaccard,
            SimilarityKind::Simplicial,
            SimilarityKind::size_filtered_default(),
        ] {
            let params = LineGraphParams::new(20.0, kind).unwrap();
            let a = build_line_graph(&h, &params).unwrap();
            let b = build_line_graph_seq(&h, &params).unwrap();
            assert_eq!(a.edges, b.edges);
        }
    }

    #[test]
    fn degree_cap_skips_hub_vertices() {
        // Vertex 0 is in every edge; capping below its degree removes all
        // pairs that only it witnesses.
        let h = TemporalHypergraph::from_numeric(
            vec![vec![0, 1], vec![0, 2], vec![0, 3]],
            vec![0.0, 1.0, 2.0],
            None,
        )
        .unwrap();
        let params = LineGraphParams::new(10.0, SimilarityKind::Jaccard).unwrap();
        assert_eq!(build_line_graph(&h, &params).unwrap().edge_count(), 3);
        let capped = params.with_max_vertex_degree(2);
        assert_eq!(build_line_graph(&h, &capped).unwrap().edge_count(), 0);
    }
}
