//! Post-clustering statistics: per-cluster reports, vertex projections,
//! correlation, distribution distances, and sigma sweeps.
//!
//! Topic statistics use each edge's primary (first) label. A label like
//! `stat.ml` has subject `stat` and category `stat.ml`; labels without a dot
//! count as their own subject and category.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extraction::{condense, excess_of_mass, Clustering};
use crate::hierarchy::{maximum_spanning_forest, single_linkage};
use crate::hypergraph::TemporalHypergraph;
use crate::linegraph::{
    build_line_graph, connected_components_with_threshold, LineGraphParams,
    LARGE_COMPONENT_THRESHOLD,
};
use crate::similarity::SimilarityKind;

/// Subject part of a label: the prefix before the first dot.
pub fn subject_of(label: &str) -> &str {
    label.split('.').next().unwrap_or(label)
}

/// Per-cluster statistics.
#[derive(Clone, Debug, Serialize)]
pub struct ClusterReport {
    pub id: u32,
    /// Number of hyperedges (papers).
    pub size: u32,
    /// Max minus min edge time, in the unit of `t(e)`.
    pub lifetime: f64,
    pub edge_size_mean: f64,
    /// Population standard deviation of the edge sizes.
    pub edge_size_std: f64,
    pub unique_subjects: u32,
    pub unique_categories: u32,
    /// Probability of each category among the cluster's labeled edges.
    pub topic_distribution: BTreeMap<String, f64>,
    /// Probability mass per member vertex: each edge spreads weight
    /// `1/|M(e)|` over its members, normalized to sum 1 over the cluster.
    pub author_distribution: BTreeMap<u32, f64>,
}

/// One report per non-outlier cluster, ordered by cluster id.
pub fn cluster_stats(h: &TemporalHypergraph, clustering: &Clustering) -> Vec<ClusterReport> {
    let k = clustering.cluster_count();
    let mut members: Vec<Vec<u32>> = vec![Vec::new(); k];
    for (e, label) in clustering.labels.iter().enumerate() {
        if let Some(c) = label {
            members[*c as usize].push(e as u32);
        }
    }
    members
        .iter()
        .enumerate()
        .map(|(c, edge_ids)| {
            let mut t_min = f64::INFINITY;
            let mut t_max = f64::NEG_INFINITY;
            let mut size_sum = 0.0;
            let mut size_sq_sum = 0.0;
            let mut subjects: BTreeSet<&str> = BTreeSet::new();
            let mut categories: BTreeSet<&str> = BTreeSet::new();
            let mut topic_counts: BTreeMap<String, f64> = BTreeMap::new();
            let mut labeled = 0usize;
            let mut author_weight: BTreeMap<u32, f64> = BTreeMap::new();
            for &eid in edge_ids {
                let edge = h.edge(eid);
                t_min = t_min.min(edge.time);
                t_max = t_max.max(edge.time);
                let s = edge.size() as f64;
                size_sum += s;
                size_sq_sum += s * s;
                if let Some(primary) = edge.labels.first() {
                    subjects.insert(subject_of(primary));
                    categories.insert(primary.as_str());
                    *topic_counts.entry(primary.clone()).or_insert(0.0) += 1.0;
                    labeled += 1;
                }
                let share = 1.0 / edge.size() as f64;
                for v in &edge.members {
                    *author_weight.entry(v.0).or_insert(0.0) += share;
                }
            }
            let n = edge_ids.len() as f64;
            let mean = size_sum / n;
            let variance = (size_sq_sum / n - mean * mean).max(0.0);
            if labeled > 0 {
                for w in topic_counts.values_mut() {
                    *w /= labeled as f64;
                }
            }
            let author_total: f64 = author_weight.values().sum();
            if author_total > 0.0 {
                for w in author_weight.values_mut() {
                    *w /= author_total;
                }
            }
            ClusterReport {
                id: c as u32,
                size: edge_ids.len() as u32,
                lifetime: t_max - t_min,
                edge_size_mean: mean,
                edge_size_std: variance.sqrt(),
                unique_subjects: subjects.len() as u32,
                unique_categories: categories.len() as u32,
                topic_distribution: topic_counts,
                author_distribution: author_weight,
            }
        })
        .collect()
}

/// Overlapping clustering of the vertices induced by the edge clustering.
#[derive(Clone, Debug)]
pub struct VertexProjection {
    /// Sorted cluster ids per vertex; empty when every incident edge is an
    /// outlier.
    pub clusters: Vec<Vec<u32>>,
    pub degrees: Vec<u32>,
}

/// A vertex joins every cluster containing at least one incident edge.
pub fn project_to_vertices(h: &TemporalHypergraph, clustering: &Clustering) -> VertexProjection {
    let n = h.vertex_count();
    let mut clusters: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut degrees: Vec<u32> = vec![0; n];
    for (e, edge) in h.edges().iter().enumerate() {
        let label = clustering.labels[e];
        for v in &edge.members {
            degrees[v.index()] += 1;
            if let Some(c) = label {
                clusters[v.index()].push(c);
            }
        }
    }
    for c in &mut clusters {
        c.sort_unstable();
        c.dedup();
    }
    VertexProjection { clusters, degrees }
}

impl VertexProjection {
    /// Fraction of vertices with no cluster at all.
    pub fn zero_cluster_fraction(&self) -> f64 {
        if self.clusters.is_empty() {
            return 0.0;
        }
        self.clusters.iter().filter(|c| c.is_empty()).count() as f64 / self.clusters.len() as f64
    }
}

/// Pearson correlation between vertex degree and per-vertex cluster count.
pub fn degree_cluster_correlation(projection: &VertexProjection) -> Result<f64> {
    let n = projection.degrees.len();
    if n < 2 {
        return Err(Error::UndefinedCorrelation("fewer than two vertices"));
    }
    let xs = &projection.degrees;
    let ys: Vec<f64> = projection.clusters.iter().map(|c| c.len() as f64).collect();
    let nf = n as f64;
    let mean_x = xs.iter().map(|&x| x as f64).sum::<f64>() / nf;
    let mean_y = ys.iter().sum::<f64>() / nf;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (&x, &y) in xs.iter().zip(&ys) {
        let dx = x as f64 - mean_x;
        let dy = y - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x == 0.0 || var_y == 0.0 {
        return Err(Error::UndefinedCorrelation("zero variance on one axis"));
    }
    Ok(cov / (var_x.sqrt() * var_y.sqrt()))
}

/// Hellinger distance `sqrt(sum (sqrt(p) - sqrt(q))^2) / sqrt(2)` between two
/// aligned probability vectors.
pub fn hellinger(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::MismatchedSupport {
            left: p.len(),
            right: q.len(),
        });
    }
    let sum: f64 = p
        .iter()
        .zip(q)
        .map(|(&a, &b)| {
            let d = a.sqrt() - b.sqrt();
            d * d
        })
        .sum();
    Ok((sum / 2.0).sqrt().clamp(0.0, 1.0))
}

/// Hellinger distance of two sparse distributions; keys missing on one side
/// carry probability 0 there.
fn hellinger_sparse<K: Ord>(p: &BTreeMap<K, f64>, q: &BTreeMap<K, f64>) -> f64 {
    let mut sum = 0.0;
    let mut pi = p.iter().peekable();
    let mut qi = q.iter().peekable();
    loop {
        match (pi.peek(), qi.peek()) {
            (Some((kp, &vp)), Some((kq, &vq))) => match kp.cmp(kq) {
                std::cmp::Ordering::Less => {
                    sum += vp;
                    pi.next();
                }
                std::cmp::Ordering::Greater => {
                    sum += vq;
                    qi.next();
                }
                std::cmp::Ordering::Equal => {
                    let d = vp.sqrt() - vq.sqrt();
                    sum += d * d;
                    pi.next();
                    qi.next();
                }
            },
            (Some((_, &vp)), None) => {
                sum += vp;
                pi.next();
            }
            (None, Some((_, &vq))) => {
                sum += vq;
                qi.next();
            }
            (None, None) => break,
        }
    }
    (sum / 2.0).sqrt().clamp(0.0, 1.0)
}

/// Which per-cluster distribution feeds the distance matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DistributionKind {
    Topics,
    Authors,
}

impl std::str::FromStr for DistributionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "topics" => Ok(DistributionKind::Topics),
            "authors" => Ok(DistributionKind::Authors),
            other => Err(Error::Parameter(format!(
                "unknown distribution kind {other:?} (expected topics or authors)"
            ))),
        }
    }
}

/// Symmetric pairwise-distance matrix with a zero diagonal.
#[derive(Clone, Debug)]
pub struct DistanceMatrix {
    pub cluster_ids: Vec<u32>,
    /// Row-major `n x n`.
    pub values: Vec<f64>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.cluster_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cluster_ids.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }
}

/// Pairwise Hellinger distances between cluster distributions, for external
/// embedding tools.
pub fn distribution_matrix(
    reports: &[ClusterReport],
    kind: DistributionKind,
) -> Result<DistanceMatrix> {
    if reports.len() < 2 {
        return Err(Error::Parameter(format!(
            "distance matrix needs at least 2 clusters, got {}",
            reports.len()
        )));
    }
    let n = reports.len();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = match kind {
                DistributionKind::Topics => hellinger_sparse(
                    &reports[i].topic_distribution,
                    &reports[j].topic_distribution,
                ),
                DistributionKind::Authors => hellinger_sparse(
                    &reports[i].author_distribution,
                    &reports[j].author_distribution,
                ),
            };
            values[i * n + j] = d;
            values[j * n + i] = d;
        }
    }
    Ok(DistanceMatrix {
        cluster_ids: reports.iter().map(|r| r.id).collect(),
        values,
    })
}

/// One sigma of a sweep.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepRow {
    pub sigma: f64,
    pub lg_edges: usize,
    pub components: usize,
    pub large_components: usize,
    /// Wall-clock build (+ cluster, unless disabled) time.
    pub seconds: f64,
}

/// Sweep configuration; `with_extraction` controls whether the timed section
/// runs the full clustering after the line graph.
#[derive(Clone, Copy, Debug)]
pub struct SweepParams {
    pub similarity: SimilarityKind,
    pub min_cluster_size: usize,
    pub allow_single_root: bool,
    pub with_extraction: bool,
    pub component_threshold: usize,
    pub max_vertex_degree: Option<usize>,
}

impl SweepParams {
    pub fn new(similarity: SimilarityKind, min_cluster_size: usize) -> Result<Self> {
        similarity.validate()?;
        if min_cluster_size < 2 {
            return Err(Error::Parameter(format!(
                "min cluster size must be at least 2, got {min_cluster_size}"
            )));
        }
        Ok(SweepParams {
            similarity,
            min_cluster_size,
            allow_single_root: false,
            with_extraction: true,
            component_threshold: LARGE_COMPONENT_THRESHOLD,
            max_vertex_degree: None,
        })
    }
}

/// Runs the line-graph construction (and by default the full clustering) for
/// each sigma, ascending, reusing the hypergraph's incidence index.
pub fn sigma_sweep(
    h: &TemporalHypergraph,
    sigmas: &[f64],
    params: &SweepParams,
) -> Result<Vec<SweepRow>> {
    for pair in sigmas.windows(2) {
        if pair[1] < pair[0] {
            return Err(Error::Parameter(format!(
                "sigma list must be sorted ascending, got {} after {}",
                pair[1], pair[0]
            )));
        }
    }
    let mut rows = Vec::with_capacity(sigmas.len());
    for &sigma in sigmas {
        let lg_params = LineGraphParams {
            sigma,
            similarity: params.similarity,
            max_vertex_degree: params.max_vertex_degree,
        };
        // Positivity of sigma is validated here.
        let start = Instant::now();
        let lg = build_line_graph(h, &lg_params)?;
        let comps = connected_components_with_threshold(&lg, params.component_threshold);
        if params.with_extraction {
            let dend = single_linkage(&maximum_spanning_forest(&lg));
            let tree = condense(&dend, params.min_cluster_size)?;
            let _ = excess_of_mass(&tree, params.allow_single_root);
        }
        let seconds = start.elapsed().as_secs_f64();
        log::info!(
            "sweep sigma={sigma}: {} lg edges, {} components ({} large) in {seconds:.3}s",
            lg.edge_count(),
            comps.component_count,
            comps.large_component_count
        );
        rows.push(SweepRow {
            sigma,
            lg_edges: lg.edge_count(),
            components: comps.component_count,
            large_components: comps.large_component_count,
            seconds,
        });
    }
    Ok(rows)
}

/// Per-cluster unique-topic counts plus the dataset-global counts.
#[derive(Clone, Debug, Serialize)]
pub struct TopicDiversity {
    pub per_cluster: Vec<ClusterTopicDiversity>,
    pub global_subjects: u32,
    pub global_categories: u32,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ClusterTopicDiversity {
    pub id: u32,
    pub size: u32,
    pub unique_subjects: u32,
    pub unique_categories: u32,
}

pub fn topic_diversity(h: &TemporalHypergraph, clustering: &Clustering) -> TopicDiversity {
    let mut global_subjects: BTreeSet<&str> = BTreeSet::new();
    let mut global_categories: BTreeSet<&str> = BTreeSet::new();
    for edge in h.edges() {
        if let Some(primary) = edge.labels.first() {
            global_subjects.insert(subject_of(primary));
            global_categories.insert(primary.as_str());
        }
    }
    let per_cluster = cluster_stats(h, clustering)
        .into_iter()
        .map(|r| ClusterTopicDiversity {
            id: r.id,
            size: r.size,
            unique_subjects: r.unique_subjects,
            unique_categories: r.unique_categories,
        })
        .collect();
    TopicDiversity {
        per_cluster,
        global_subjects: global_subjects.len() as u32,
        global_categories: global_categories.len() as u32,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toy() -> (TemporalHypergraph, Clustering) {
        // Edges 0-2 form cluster 0, edges 3-4 cluster 1, edge 5 is outlier.
        let h = TemporalHypergraph::from_numeric(
            vec![
                vec![0, 1],
                vec![0, 1, 2],
                vec![1, 2],
                vec![3, 4],
                vec![3, 4, 5],
                vec![6],
            ],
            vec![100.0, 150.0, 400.0, 10.0, 10.0, 50.0],
            Some(vec![
                vec!["math.at".into()],
                vec!["stat.ml".into()],
                vec!["math.co".into()],
                vec!["cs.ai".into()],
                vec!["cs.ai".into()],
                vec![],
            ]),
        )
        .unwrap();
        let clustering = Clustering::from_labels(vec![
            Some(0),
            Some(0),
            Some(0),
            Some(1),
            Some(1),
            None,
        ])
        .unwrap();
        (h, clustering)
    }

    #[test]
    fn lifetimes_and_moments() {
        let (h, clustering) = toy();
        let reports = cluster_stats(&h, &clustering);
        assert_eq!(reports.len(), 2);
        let r0 = &reports[0];
        assert!((r0.lifetime - 300.0).abs() < 1e-9);
        assert!((r0.edge_size_mean - 7.0 / 3.0).abs() < 1e-12);
        // Population std of sizes {2,3,2}.
        let var: f64 = (2.0 / 9.0f64).max(0.0);
        assert!((r0.edge_size_std - var.sqrt()).abs() < 1e-12);
        let r1 = &reports[1];
        assert_eq!(r1.size, 2);
        assert_eq!(r1.lifetime, 0.0);
        // {math.at, stat.ml, math.co} -> 2 subjects, 3 categories.
        assert_eq!(r0.unique_subjects, 2);
        assert_eq!(r0.unique_categories, 3);
    }

    #[test]
    fn single_edge_cluster_has_zero_lifetime() {
        let h = TemporalHypergraph::from_numeric(vec![vec![0, 1]], vec![42.0], None).unwrap();
        let clustering = Clustering::from_labels(vec![Some(0)]).unwrap();
        let reports = cluster_stats(&h, &clustering);
        assert_eq!(reports[0].lifetime, 0.0);
    }

    #[test]
    fn distributions_are_probability_vectors() {
        let (h, clustering) = toy();
        for r in cluster_stats(&h, &clustering) {
            let tsum: f64 = r.topic_distribution.values().sum();
            assert!((tsum - 1.0).abs() < 1e-9);
            let asum: f64 = r.author_distribution.values().sum();
            assert!((asum - 1.0).abs() < 1e-9);
            assert!(r.topic_distribution.values().all(|&v| v >= 0.0));
            assert!(r.author_distribution.values().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn author_weights_follow_inverse_edge_size() {
        let (h, clustering) = toy();
        let reports = cluster_stats(&h, &clustering);
        // Cluster 1: edges {3,4}@sizes 2,3. Vertex 3 weight: 1/2 + 1/3,
        // vertex 5: 1/3, normalized by 2 papers.
        let r1 = &reports[1];
        assert!((r1.author_distribution[&3] - (0.5 + 1.0 / 3.0) / 2.0).abs() < 1e-12);
        assert!((r1.author_distribution[&5] - (1.0 / 3.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn projection_collects_incident_cluster_labels() {
        let (h, clustering) = toy();
        let proj = project_to_vertices(&h, &clustering);
        assert_eq!(proj.clusters[1], vec![0]); // vertex 1 only in cluster 0
        assert_eq!(proj.clusters[3], vec![1]);
        assert_eq!(proj.clusters[6], Vec::<u32>::new()); // outlier-only author
        for (v, c) in proj.clusters.iter().enumerate() {
            assert!(c.len() <= proj.degrees[v] as usize);
        }
        // Sizes + outliers partition the edge set.
        let sizes: u32 = clustering.clusters.iter().map(|c| c.size).sum();
        assert_eq!(sizes as usize + clustering.outlier_count(), h.edge_count());
    }

    #[test]
    fn correlation_limits() {
        // Cluster count equal to degree -> r = 1.
        let proj = VertexProjection {
            clusters: vec![vec![0], vec![0, 1], vec![0, 1, 2]],
            degrees: vec![1, 2, 3],
        };
        assert!((degree_cluster_correlation(&proj).unwrap() - 1.0).abs() < 1e-12);
        // Anti-linear -> r = -1.
        let proj = VertexProjection {
            clusters: vec![vec![0, 1, 2], vec![0, 1], vec![0]],
            degrees: vec![1, 2, 3],
        };
        assert!((degree_cluster_correlation(&proj).unwrap() + 1.0).abs() < 1e-12);
        // Zero variance -> error.
        let proj = VertexProjection {
            clusters: vec![vec![0], vec![0]],
            degrees: vec![2, 2],
        };
        assert!(degree_cluster_correlation(&proj).is_err());
    }

    #[test]
    fn hellinger_reference_points() {
        assert_eq!(hellinger(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        assert!((hellinger(&[1.0, 0.0], &[0.0, 1.0]).unwrap() - 1.0).abs() < 1e-12);
        let d = hellinger(&[1.0, 0.0], &[0.5, 0.5]).unwrap();
        assert!((d - 0.5411961001461969).abs() < 1e-9);
        assert!(matches!(
            hellinger(&[1.0], &[0.5, 0.5]),
            Err(Error::MismatchedSupport { .. })
        ));
    }

    #[test]
    fn sparse_hellinger_matches_dense() {
        let p: BTreeMap<&str, f64> = [("a", 0.5), ("b", 0.5)].into_iter().collect();
        let q: BTreeMap<&str, f64> = [("b", 0.25), ("c", 0.75)].into_iter().collect();
        let dense_p = [0.5, 0.5, 0.0];
        let dense_q = [0.0, 0.25, 0.75];
        let sparse = hellinger_sparse(&p, &q);
        let dense = hellinger(&dense_p, &dense_q).unwrap();
        assert!((sparse - dense).abs() < 1e-12);
    }

    #[test]
    fn distance_matrix_shape_and_extremes() {
        let (h, clustering) = toy();
        let reports = cluster_stats(&h, &clustering);
        let m = distribution_matrix(&reports, DistributionKind::Topics).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.get(0, 0), 0.0);
        assert_eq!(m.get(0, 1), m.get(1, 0));
        // Disjoint topic supports -> distance 1.
        assert!((m.get(0, 1) - 1.0).abs() < 1e-12);
        assert!(distribution_matrix(&reports[..1], DistributionKind::Topics).is_err());
    }

    #[test]
    fn sweep_validates_order_and_is_monotone() {
        let h = crate::synthetic::random_hypergraph(80, 12, (1, 5), (0.0, 100.0), 11);
        let params = SweepParams::new(SimilarityKind::Jaccard, 10).unwrap();
        assert!(sigma_sweep(&h, &[20.0, 10.0], &params).is_err());
        assert!(sigma_sweep(&h, &[-5.0, 10.0], &params).is_err());
        let rows = sigma_sweep(&h, &[5.0, 20.0, 60.0], &params).unwrap();
        assert_eq!(rows.len(), 3);
        for pair in rows.windows(2) {
            assert!(pair[0].lg_edges <= pair[1].lg_edges);
            assert!(pair[0].components >= pair[1].components);
        }
    }

    #[test]
    fn diversity_counts() {
        let (h, clustering) = toy();
        let div = topic_diversity(&h, &clustering);
        assert_eq!(div.global_subjects, 3); // math, stat, cs
        assert_eq!(div.global_categories, 4);
        let c1 = div.per_cluster.iter().find(|c| c.id == 1).unwrap();
        assert_eq!((c1.unique_subjects, c1.unique_categories), (1, 1));
        let c0 = div.per_cluster.iter().find(|c| c.id == 0).unwrap();
        assert_eq!((c0.unique_subjects, c0.unique_categories), (2, 3));
    }

    proptest! {
        #[test]
        fn hellinger_is_a_metric_on_the_simplex(
            raw_p in proptest::collection::vec(1e-6f64..1.0, 4),
            raw_q in proptest::collection::vec(1e-6f64..1.0, 4),
            raw_r in proptest::collection::vec(1e-6f64..1.0, 4),
        ) {
            let norm = |v: &[f64]| {
                let s: f64 = v.iter().sum();
                v.iter().map(|x| x / s).collect::<Vec<_>>()
            };
            let (p, q, r) = (norm(&raw_p), norm(&raw_q), norm(&raw_r));
            let pq = hellinger(&p, &q).unwrap();
            let qp = hellinger(&q, &p).unwrap();
            prop_assert!((pq - qp).abs() < 1e-12);
            prop_assert!(hellinger(&p, &p).unwrap() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&pq));
            let pr = hellinger(&p, &r).unwrap();
            let rq = hellinger(&r, &q).unwrap();
            prop_assert!(pq <= pr + rq + 1e-12);
        }
    }
}
