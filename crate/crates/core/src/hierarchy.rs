//! Maximum spanning forest and the single-linkage hierarchy replayed from it.
//!
//! Single linkage over the full line graph only ever merges along maximum
//! spanning forest edges, so the forest is a lossless, linear-size stand-in
//! for the whole adjacency. Distances are `d = 1 - w`, which maps weights in
//! (0, 1] to [0, 1) and reverses the ordering, so the maximum spanning forest
//! on weights is the minimum spanning forest on distances.

use crate::linegraph::{LineEdge, WeightedLineGraph};
use crate::parallel;
use crate::union_find::UnionFind;

/// Maximum-weight spanning forest of the line graph.
#[derive(Clone, Debug)]
pub struct SpanningForest {
    pub vertex_count: usize,
    /// One tree per connected component, in Kruskal acceptance order.
    pub edges: Vec<LineEdge>,
}

/// One agglomeration step. `left`/`right` are dendrogram node ids: leaves are
/// line-graph vertices `0..leaf_count`, internal nodes continue from
/// `leaf_count` in merge order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Merge {
    pub left: u32,
    pub right: u32,
    pub distance: f64,
    pub size: u32,
}

/// Single-linkage merge sequence; a forest when the line graph is
/// disconnected (one interleaved sequence, non-decreasing per component).
#[derive(Clone, Debug)]
pub struct Dendrogram {
    pub leaf_count: usize,
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn node_count(&self) -> usize {
        self.leaf_count + self.merges.len()
    }

    /// Children of an internal node.
    pub fn children(&self, node: u32) -> (u32, u32) {
        let m = &self.merges[node as usize - self.leaf_count];
        (m.left, m.right)
    }

    /// Merge distance of an internal node.
    pub fn distance(&self, node: u32) -> f64 {
        self.merges[node as usize - self.leaf_count].distance
    }

    /// Leaves under a node (1 for leaf nodes).
    pub fn subtree_size(&self, node: u32) -> u32 {
        if (node as usize) < self.leaf_count {
            1
        } else {
            self.merges[node as usize - self.leaf_count].size
        }
    }

    /// Root node of every component, ascending.
    pub fn roots(&self) -> Vec<u32> {
        let mut has_parent = vec![false; self.node_count()];
        for m in &self.merges {
            has_parent[m.left as usize] = true;
            has_parent[m.right as usize] = true;
        }
        (0..self.node_count() as u32)
            .filter(|&n| !has_parent[n as usize])
            .collect()
    }
}

/// Kruskal selection in decreasing weight order, ties broken by (i, j).
pub fn maximum_spanning_forest(lg: &WeightedLineGraph) -> SpanningForest {
    maximum_spanning_forest_impl(lg, true)
}

pub fn maximum_spanning_forest_seq(lg: &WeightedLineGraph) -> SpanningForest {
    maximum_spanning_forest_impl(lg, false)
}

fn maximum_spanning_forest_impl(lg: &WeightedLineGraph, par: bool) -> SpanningForest {
    let mut order = lg.edges.clone();
    parallel::sort_unstable_by(&mut order, par, |a, b| {
        b.w.total_cmp(&a.w).then_with(|| (a.i, a.j).cmp(&(b.i, b.j)))
    });
    let mut uf = UnionFind::new(lg.vertex_count);
    let mut edges = Vec::with_capacity(lg.vertex_count.saturating_sub(1));
    for e in order {
        if uf.union(e.i, e.j).is_some() {
            edges.push(e);
        }
    }
    SpanningForest {
        vertex_count: lg.vertex_count,
        edges,
    }
}

/// Replays the forest edges in increasing distance `d = 1 - w` (ties by
/// (i, j)), recording one merge per edge. Equivalent to single-linkage
/// agglomeration over all connected line-graph pairs.
pub fn single_linkage(forest: &SpanningForest) -> Dendrogram {
    let n = forest.vertex_count;
    let mut order: Vec<(f64, u32, u32)> = forest
        .edges
        .iter()
        .map(|e| (1.0 - e.w, e.i, e.j))
        .collect();
    parallel::sort_unstable_by(&mut order, true, |a, b| {
        a.0.total_cmp(&b.0).then_with(|| (a.1, a.2).cmp(&(b.1, b.2)))
    });

    let mut uf = UnionFind::new(n);
    // Dendrogram node currently representing each union-find root.
    let mut node_of_root: Vec<u32> = (0..n as u32).collect();
    let mut merges = Vec::with_capacity(order.len());
    for (d, i, j) in order {
        let (ri, rj) = (uf.find(i), uf.find(j));
        debug_assert_ne!(ri, rj, "forest edges never form cycles");
        let (a, b) = (node_of_root[ri as usize], node_of_root[rj as usize]);
        let size = (uf.size_of(ri) + uf.size_of(rj)) as u32;
        let new_node = (n + merges.len()) as u32;
        merges.push(Merge {
            left: a.min(b),
            right: a.max(b),
            distance: d,
            size,
        });
        let root = uf.union(ri, rj).expect("distinct roots");
        node_of_root[root as usize] = new_node;
    }
    Dendrogram {
        leaf_count: n,
        merges,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linegraph::LineEdge;

    fn lg(n: usize, edges: &[(u32, u32, f64)]) -> WeightedLineGraph {
        WeightedLineGraph {
            vertex_count: n,
            edges: edges
                .iter()
                .map(|&(i, j, w)| LineEdge { i, j, w })
                .collect(),
        }
    }

    #[test]
    fn kruskal_breaks_the_weakest_cycle_edge() {
        let forest = maximum_spanning_forest(&lg(3, &[(0, 1, 0.9), (1, 2, 0.8), (0, 2, 0.5)]));
        let kept: Vec<(u32, u32)> = forest.edges.iter().map(|e| (e.i, e.j)).collect();
        assert_eq!(kept, vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn a_tree_passes_through_unchanged() {
        let input = lg(4, &[(0, 1, 0.4), (1, 2, 0.9), (2, 3, 0.2)]);
        let forest = maximum_spanning_forest(&input);
        let mut kept: Vec<(u32, u32)> = forest.edges.iter().map(|e| (e.i, e.j)).collect();
        kept.sort_unstable();
        assert_eq!(kept, vec![(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn two_disjoint_triangles_give_two_trees() {
        let forest = maximum_spanning_forest(&lg(
            6,
            &[
                (0, 1, 0.9),
                (1, 2, 0.8),
                (0, 2, 0.5),
                (3, 4, 0.7),
                (4, 5, 0.6),
                (3, 5, 0.3),
            ],
        ));
        assert_eq!(forest.edges.len(), 4);
    }

    #[test]
    fn single_linkage_replays_in_distance_order() {
        // Forest {(A,B,w=0.9), (B,C,w=0.8)} -> merges
        // [(A,B,d=0.1,2), (AB,C,d=0.2,3)].
        let forest = maximum_spanning_forest(&lg(3, &[(0, 1, 0.9), (1, 2, 0.8)]));
        let dend = single_linkage(&forest);
        assert_eq!(dend.merges.len(), 2);
        let m0 = dend.merges[0];
        assert_eq!((m0.left, m0.right, m0.size), (0, 1, 2));
        assert!((m0.distance - 0.1).abs() < 1e-12);
        let m1 = dend.merges[1];
        assert_eq!((m1.left, m1.right, m1.size), (2, 3, 3));
        assert!((m1.distance - 0.2).abs() < 1e-12);
        assert_eq!(dend.roots(), vec![4]);
    }

    #[test]
    fn single_leaf_has_no_merges() {
        let forest = maximum_spanning_forest(&lg(1, &[]));
        let dend = single_linkage(&forest);
        assert!(dend.merges.is_empty());
        assert_eq!(dend.roots(), vec![0]);
    }

    #[test]
    fn n_leaf_tree_has_n_minus_one_merges() {
        let edges: Vec<(u32, u32, f64)> =
            (0..9).map(|i| (i, i + 1, 0.5 + 0.04 * i as f64)).collect();
        let dend = single_linkage(&maximum_spanning_forest(&lg(10, &edges)));
        assert_eq!(dend.merges.len(), 9);
        assert_eq!(dend.subtree_size(dend.roots()[0]), 10);
    }

    /// Max-weight acyclic edge subset by exhaustive enumeration. With all
    /// weights positive this is exactly the maximum spanning forest.
    fn brute_force_forest_weight(n: usize, edges: &[(u32, u32, f64)]) -> f64 {
        let mut best = 0.0f64;
        for mask in 0u32..(1 << edges.len()) {
            let mut uf = crate::union_find::UnionFind::new(n);
            let mut weight = 0.0;
            let mut acyclic = true;
            for (idx, &(i, j, w)) in edges.iter().enumerate() {
                if mask & (1 << idx) != 0 {
                    if uf.union(i, j).is_none() {
                        acyclic = false;
                        break;
                    }
                    weight += w;
                }
            }
            if acyclic && weight > best {
                best = weight;
            }
        }
        best
    }

    #[test]
    fn forest_weight_matches_exhaustive_enumeration() {
        let mut rng = 0xDEADBEEFu64;
        let mut next = || {
            // xorshift; keeps the test free of external RNG state.
            rng ^= rng << 13;
            rng ^= rng >> 7;
            rng ^= rng << 17;
            rng
        };
        for _ in 0..30 {
            let n = 2 + (next() % 9) as usize; // up to 10 vertices
            let mut edges = Vec::new();
            for i in 0..n as u32 {
                for j in (i + 1)..n as u32 {
                    if next() % 10 < 3 && edges.len() < 14 {
                        let w = ((next() % 1000) + 1) as f64 / 1000.0;
                        edges.push((i, j, w));
                    }
                }
            }
            let forest = maximum_spanning_forest(&lg(n, &edges));
            let total: f64 = forest.edges.iter().map(|e| e.w).sum();
            let best = brute_force_forest_weight(n, &edges);
            assert!(
                (total - best).abs() < 1e-9,
                "kruskal weight {total} vs exhaustive {best}"
            );
        }
    }

    #[test]
    fn max_forest_on_weights_is_min_forest_on_distances() {
        let h = crate::synthetic::random_hypergraph(60, 10, (1, 5), (0.0, 50.0), 17);
        let params =
            crate::linegraph::LineGraphParams::new(20.0, crate::similarity::SimilarityKind::Jaccard)
                .unwrap();
        let g = crate::linegraph::build_line_graph(&h, &params).unwrap();
        let max_forest = maximum_spanning_forest(&g);
        // Kruskal on ascending d = 1 - w, same tie rule.
        let mut order = g.edges.clone();
        order.sort_unstable_by(|a, b| {
            (1.0 - a.w)
                .total_cmp(&(1.0 - b.w))
                .then_with(|| (a.i, a.j).cmp(&(b.i, b.j)))
        });
        let mut uf = crate::union_find::UnionFind::new(g.vertex_count);
        let mut min_forest = Vec::new();
        for e in order {
            if uf.union(e.i, e.j).is_some() {
                min_forest.push((e.i, e.j));
            }
        }
        let mut max_pairs: Vec<(u32, u32)> = max_forest.edges.iter().map(|e| (e.i, e.j)).collect();
        max_pairs.sort_unstable();
        min_forest.sort_unstable();
        assert_eq!(max_pairs, min_forest);
        for e in &max_forest.edges {
            let d = 1.0 - e.w;
            assert!((0.0..1.0).contains(&d));
        }
    }

    #[test]
    fn merge_distances_non_decreasing_per_component_and_total_count() {
        let h = crate::synthetic::random_hypergraph(80, 14, (1, 5), (0.0, 60.0), 3);
        let params =
            crate::linegraph::LineGraphParams::new(25.0, crate::similarity::SimilarityKind::Jaccard)
                .unwrap();
        let lg = crate::linegraph::build_line_graph(&h, &params).unwrap();
        let comps = crate::linegraph::connected_components(&lg);
        let dend = single_linkage(&maximum_spanning_forest(&lg));
        assert_eq!(
            dend.merges.len(),
            lg.vertex_count - comps.component_count
        );
        // Global replay order is sorted, so distances are non-decreasing
        // overall (hence per component too).
        for w in dend.merges.windows(2) {
            assert!(w[0].distance <= w[1].distance);
        }
        // Every leaf appears exactly once across the forest.
        let total: u32 = dend.roots().iter().map(|&r| dend.subtree_size(r)).sum();
        assert_eq!(total as usize, lg.vertex_count);
    }
}
