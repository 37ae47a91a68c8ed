//! Deterministic synthetic hypergraph generators for tests and benchmarks.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};

use crate::hypergraph::TemporalHypergraph;

/// Uniform random hypergraph: every edge draws its size from
/// `size_range` (inclusive) and its members uniformly without replacement.
pub fn random_hypergraph(
    n_edges: usize,
    n_vertices: usize,
    size_range: (usize, usize),
    time_range: (f64, f64),
    seed: u64,
) -> TemporalHypergraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut members = Vec::with_capacity(n_edges);
    let mut times = Vec::with_capacity(n_edges);
    for _ in 0..n_edges {
        let size = rng.random_range(size_range.0..=size_range.1.min(n_vertices));
        let mut set = HashSet::with_capacity(size);
        while set.len() < size {
            set.insert(rng.random_range(0..n_vertices as u32));
        }
        let mut m: Vec<u32> = set.into_iter().collect();
        m.sort_unstable();
        members.push(m);
        times.push(rng.random_range(time_range.0..time_range.1));
    }
    TemporalHypergraph::from_numeric(members, times, None).expect("valid synthetic input")
}

/// Layout of a planted-collaboration benchmark instance.
#[derive(Clone, Copy, Debug)]
pub struct PlantedConfig {
    pub groups: usize,
    /// Author count per group, inclusive.
    pub group_size_range: (usize, usize),
    pub papers_per_group: usize,
    /// Length of each group's publication window.
    pub window_days: f64,
    /// Probability that a group author joins any given group paper.
    pub member_prob: f64,
    /// Consecutive groups share one author (an author moving between
    /// collaborations), which ties the planted groups into one component
    /// with weak links the clustering has to cut correctly.
    pub chain_groups: bool,
    pub noise_papers: usize,
    /// Authors outside any planted group; noise papers draw only from this
    /// pool.
    pub noise_author_pool: usize,
    /// Author count per noise paper, inclusive.
    pub noise_size_range: (usize, usize),
    pub total_days: f64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        PlantedConfig {
            groups: 20,
            group_size_range: (5, 15),
            papers_per_group: 15,
            window_days: 200.0,
            member_prob: 0.8,
            chain_groups: true,
            noise_papers: 500,
            noise_author_pool: 1600,
            noise_size_range: (2, 6),
            total_days: 2000.0,
        }
    }
}

/// A planted instance plus its ground truth: `Some(group)` for planted
/// papers, `None` for noise papers.
#[derive(Clone, Debug)]
pub struct PlantedData {
    pub hypergraph: TemporalHypergraph,
    pub truth: Vec<Option<u32>>,
}

/// Generates planted collaborations: author groups, each publishing
/// `papers_per_group` papers inside a bounded window. Group windows are
/// staggered across `total_days`, and with `chain_groups` each group shares
/// one member with its predecessor (an author moving on), so the planted
/// structure forms one weakly linked component that the clustering has to
/// cut at the right places. Noise papers draw random authors from a
/// separate pool and stress the outlier side.
pub fn planted_hypergraph(cfg: &PlantedConfig, seed: u64) -> PlantedData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut members: Vec<Vec<u32>> = Vec::new();
    let mut times: Vec<f64> = Vec::new();
    let mut truth: Vec<Option<u32>> = Vec::new();

    let mut group_authors: Vec<Vec<u32>> = Vec::with_capacity(cfg.groups);
    let mut next_author = 0u32;
    for g in 0..cfg.groups {
        let size = rng.random_range(cfg.group_size_range.0..=cfg.group_size_range.1);
        let mut authors: Vec<u32> = (next_author..next_author + size as u32).collect();
        next_author += size as u32;
        if cfg.chain_groups && g > 0 {
            authors[0] = *group_authors[g - 1].last().unwrap();
        }
        group_authors.push(authors);
    }

    // Stagger the windows so consecutive (chained) groups overlap in time.
    let span = (cfg.total_days - cfg.window_days).max(1.0);
    let step = span / cfg.groups.max(1) as f64;
    for (g, authors) in group_authors.iter().enumerate() {
        let start = step * g as f64 + rng.random_range(0.0..step.max(1.0));
        for _ in 0..cfg.papers_per_group {
            let mut paper: Vec<u32> = authors
                .iter()
                .copied()
                .filter(|_| rng.random_bool(cfg.member_prob))
                .collect();
            while paper.len() < 2 {
                let a = authors[rng.random_range(0..authors.len())];
                if !paper.contains(&a) {
                    paper.push(a);
                }
            }
            paper.sort_unstable();
            paper.dedup();
            members.push(paper);
            times.push(start + rng.random_range(0.0..cfg.window_days));
            truth.push(Some(g as u32));
        }
    }

    for _ in 0..cfg.noise_papers {
        let size = rng.random_range(cfg.noise_size_range.0..=cfg.noise_size_range.1);
        let mut set = HashSet::with_capacity(size);
        while set.len() < size {
            set.insert(next_author + rng.random_range(0..cfg.noise_author_pool as u32));
        }
        let mut paper: Vec<u32> = set.into_iter().collect();
        paper.sort_unstable();
        members.push(paper);
        times.push(rng.random_range(0.0..cfg.total_days));
        truth.push(None);
    }

    let hypergraph =
        TemporalHypergraph::from_numeric(members, times, None).expect("valid synthetic input");
    PlantedData { hypergraph, truth }
}

/// Layout of a large-scale benchmark instance with power-law edge sizes and
/// Zipf-distributed vertex popularity.
#[derive(Clone, Copy, Debug)]
pub struct PowerLawConfig {
    pub n_edges: usize,
    pub n_vertices: usize,
    /// Exponent of `P(size) ∝ size^-a` on `1..=max_size`.
    pub size_exponent: f64,
    pub max_size: usize,
    /// Zipf exponent of vertex popularity.
    pub vertex_exponent: f64,
    pub total_days: f64,
}

impl Default for PowerLawConfig {
    fn default() -> Self {
        PowerLawConfig {
            n_edges: 1_000_000,
            n_vertices: 1_200_000,
            size_exponent: 2.0,
            max_size: 150,
            vertex_exponent: 0.7,
            total_days: 2557.0,
        }
    }
}

/// Collaboration-like hypergraph: heavy-tailed edge sizes, heavy-tailed
/// author activity, uniform posting times.
pub fn powerlaw_hypergraph(cfg: &PowerLawConfig, seed: u64) -> TemporalHypergraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Inverse-CDF table for the size distribution.
    let mut cumulative = Vec::with_capacity(cfg.max_size);
    let mut total = 0.0;
    for s in 1..=cfg.max_size {
        total += (s as f64).powf(-cfg.size_exponent);
        cumulative.push(total);
    }
    let zipf = Zipf::new(cfg.n_vertices as f64, cfg.vertex_exponent).expect("valid zipf");

    let mut members = Vec::with_capacity(cfg.n_edges);
    let mut times = Vec::with_capacity(cfg.n_edges);
    for _ in 0..cfg.n_edges {
        let u = rng.random_range(0.0..total);
        let size = cumulative.partition_point(|&c| c < u) + 1;
        let mut set = HashSet::with_capacity(size);
        let mut attempts = 0;
        while set.len() < size && attempts < size * 20 {
            let v = zipf.sample(&mut rng) as u64 - 1;
            set.insert(v as u32);
            attempts += 1;
        }
        let mut m: Vec<u32> = set.into_iter().collect();
        m.sort_unstable();
        members.push(m);
        times.push(rng.random_range(0.0..cfg.total_days));
    }
    TemporalHypergraph::from_numeric(members, times, None).expect("valid synthetic input")
}
