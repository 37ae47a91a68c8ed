//! The five subcommands.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use hyperline_core::analysis::{
    cluster_stats, degree_cluster_correlation, distribution_matrix, project_to_vertices,
    sigma_sweep, topic_diversity, DistributionKind, SweepParams,
};
use hyperline_core::extraction::{extract_full, Clustering, ExtractParams};
use hyperline_core::hypergraph::{TemporalHypergraph, TimeUnit};
use hyperline_core::linegraph::LARGE_COMPONENT_THRESHOLD;
use hyperline_core::similarity::SimilarityKind;

use crate::output::{sig12, write_atomic, write_json, Manifest};
use crate::{
    CliError, ClusterArgs, ExportDistancesArgs, IngestArgs, PipelineArgs, StatsArgs, SweepArgs,
};

fn open_input(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn load_jsonl(path: &Path) -> Result<TemporalHypergraph, CliError> {
    let start = Instant::now();
    let h = TemporalHypergraph::parse_jsonl(open_input(path)?)?;
    log::info!(
        "parsed {} edges over {} vertices from {} in {:.2}s",
        h.edge_count(),
        h.vertex_count(),
        path.display(),
        start.elapsed().as_secs_f64()
    );
    Ok(h)
}

fn parse_time_unit(s: &str) -> Result<TimeUnit, CliError> {
    s.parse::<TimeUnit>().map_err(CliError::from)
}

fn similarity_of(args: &PipelineArgs) -> Result<SimilarityKind, CliError> {
    let kind = match args.similarity.as_str() {
        "size-filtered" | "size_filtered" => SimilarityKind::SizeFiltered {
            slack_ratio: args.slack_ratio,
            slack_offset: args.slack_offset,
        },
        other => other.parse::<SimilarityKind>()?,
    };
    kind.validate()?;
    Ok(kind)
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct IngestParams {
    clean_prefix: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    csv_incidence: Option<String>,
}

pub fn ingest(args: IngestArgs) -> Result<(), CliError> {
    let (h, primary_input, csv_incidence) = match (&args.input, &args.csv_edges) {
        (Some(path), _) => (TemporalHypergraph::parse_jsonl(open_input(path)?)?, path, None),
        (None, Some(edges_path)) => {
            let incidence_path = args.csv_incidence.as_ref().expect("clap requires");
            let h = TemporalHypergraph::parse_csv(
                open_input(edges_path)?,
                open_input(incidence_path)?,
            )?;
            (h, edges_path, Some(incidence_path.display().to_string()))
        }
        (None, None) => {
            return Err(CliError::parameter(
                "ingest needs --input or --csv-edges/--csv-incidence",
            ));
        }
    };
    log::info!(
        "parsed {} edges over {} vertices",
        h.edge_count(),
        h.vertex_count()
    );

    // Original record identity for the id map: explicit id, else ordinal.
    let originals: Vec<String> = h
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| e.source_id.clone().unwrap_or_else(|| i.to_string()))
        .collect();

    let (clean, report) = h.clean_authors(&args.clean_prefix)?;
    log::info!(
        "removed {} vertices and {} edges; {} edges remain",
        report.removed_vertices,
        report.removed_edges,
        clean.edge_count()
    );

    let dir = &args.out;
    write_atomic(dir, "cleaned.jsonl", |w| clean.write_jsonl(w).map_err(to_io))?;
    write_json(dir, "clean_report.json", &report)?;
    write_atomic(dir, "id_map.tsv", |w| {
        for (new_id, &old_id) in report.kept_edges.iter().enumerate() {
            writeln!(w, "{new_id}\t{}", originals[old_id as usize])?;
        }
        Ok(())
    })?;
    Manifest::new(
        "ingest",
        primary_input,
        IngestParams {
            clean_prefix: args.clean_prefix.clone(),
            csv_incidence,
        },
        &["cleaned.jsonl", "clean_report.json", "id_map.tsv"],
    )?
    .commit(dir)
}

fn to_io(e: hyperline_core::Error) -> std::io::Error {
    match e {
        hyperline_core::Error::Io(io) => io,
        other => std::io::Error::other(other.to_string()),
    }
}

// ---------------------------------------------------------------------------
// cluster
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ClusterParams {
    sigma: f64,
    similarity: SimilarityKind,
    min_cluster_size: usize,
    allow_single_root: bool,
    time_unit: TimeUnit,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_vertex_degree: Option<usize>,
}

#[derive(Serialize)]
struct ComponentsOut {
    components: usize,
    large_components: usize,
    threshold: usize,
}

pub fn cluster(args: ClusterArgs) -> Result<(), CliError> {
    let sigma = args
        .sigma
        .ok_or_else(|| CliError::parameter("--sigma is required (flag or config file)"))?;
    let unit = parse_time_unit(&args.pipeline.time_unit)?;
    let similarity = similarity_of(&args.pipeline)?;
    let params = ExtractParams::new(sigma, similarity, args.pipeline.min_cluster_size)?
        .with_allow_single_root(args.pipeline.allow_single_root)
        .with_max_vertex_degree(args.pipeline.max_vertex_degree);

    let h = load_jsonl(&args.pipeline.input)?.normalize_times(unit)?;
    let start = Instant::now();
    let artifacts = extract_full(&h, &params, LARGE_COMPONENT_THRESHOLD)?;
    let clustering = &artifacts.clustering;
    log::info!(
        "line graph: {} edges, {} components; {} clusters, {:.1}% outliers in {:.2}s",
        artifacts.line_graph.edge_count(),
        artifacts.components.component_count,
        clustering.cluster_count(),
        clustering.outlier_fraction() * 100.0,
        start.elapsed().as_secs_f64()
    );

    let dir = &args.pipeline.out;
    let mut outputs = vec![
        "labels.tsv",
        "clusters.json",
        "report.json",
        "components.json",
    ];
    write_atomic(dir, "labels.tsv", |w| {
        for (e, label) in clustering.labels.iter().enumerate() {
            match label {
                Some(c) => writeln!(w, "{e}\t{c}")?,
                None => writeln!(w, "{e}\t-1")?,
            }
        }
        Ok(())
    })?;
    write_json(dir, "clusters.json", &clustering.clusters)?;
    write_json(dir, "report.json", &cluster_stats(&h, clustering))?;
    write_json(
        dir,
        "components.json",
        &ComponentsOut {
            components: artifacts.components.component_count,
            large_components: artifacts.components.large_component_count,
            threshold: artifacts.components.threshold,
        },
    )?;

    if args.dump_line_graph {
        outputs.push("line_graph.csv");
        write_atomic(dir, "line_graph.csv", |w| {
            writeln!(w, "i,j,w")?;
            for e in &artifacts.line_graph.edges {
                writeln!(w, "{},{},{}", e.i, e.j, sig12(e.w))?;
            }
            Ok(())
        })?;
    }
    if args.dump_dendrogram {
        outputs.push("dendrogram.csv");
        write_atomic(dir, "dendrogram.csv", |w| {
            writeln!(w, "left,right,distance,size")?;
            for m in &artifacts.dendrogram.merges {
                writeln!(w, "{},{},{},{}", m.left, m.right, sig12(m.distance), m.size)?;
            }
            Ok(())
        })?;
    }
    if args.dump_condensed {
        outputs.push("condensed.csv");
        write_atomic(dir, "condensed.csv", |w| {
            writeln!(w, "kind,parent,child,lambda,size")?;
            for (id, c) in artifacts.condensed.clusters.iter().enumerate() {
                let parent = c.parent.map_or(-1i64, |p| p as i64);
                writeln!(w, "cluster,{parent},{id},{},{}", sig12(c.birth_lambda), c.size)?;
                for &(point, lambda) in &c.points {
                    writeln!(w, "point,{id},{point},{},1", sig12(lambda))?;
                }
            }
            Ok(())
        })?;
    }

    Manifest::new(
        "cluster",
        &args.pipeline.input,
        ClusterParams {
            sigma,
            similarity,
            min_cluster_size: args.pipeline.min_cluster_size,
            allow_single_root: args.pipeline.allow_single_root,
            time_unit: unit,
            max_vertex_degree: args.pipeline.max_vertex_degree,
        },
        &outputs,
    )?
    .commit(dir)
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SweepParamsOut {
    sigmas: Vec<f64>,
    similarity: SimilarityKind,
    min_cluster_size: usize,
    with_extraction: bool,
    time_unit: TimeUnit,
}

pub fn sweep(args: SweepArgs) -> Result<(), CliError> {
    let sigmas_raw = args
        .sigmas
        .ok_or_else(|| CliError::parameter("--sigmas is required"))?;
    let sigmas = sigmas_raw
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::parameter(format!("bad sigma {s:?}")))
        })
        .collect::<Result<Vec<f64>, _>>()?;
    let unit = parse_time_unit(&args.pipeline.time_unit)?;
    let similarity = similarity_of(&args.pipeline)?;
    let mut params = SweepParams::new(similarity, args.pipeline.min_cluster_size)?;
    params.allow_single_root = args.pipeline.allow_single_root;
    params.with_extraction = !args.no_extract;
    params.max_vertex_degree = args.pipeline.max_vertex_degree;

    let h = load_jsonl(&args.pipeline.input)?.normalize_times(unit)?;
    let rows = sigma_sweep(&h, &sigmas, &params)?;

    let dir = &args.pipeline.out;
    write_atomic(dir, "sweep.csv", |w| {
        writeln!(w, "sigma,lg_edges,components,large_components,seconds")?;
        for r in &rows {
            writeln!(
                w,
                "{},{},{},{},{}",
                sig12(r.sigma),
                r.lg_edges,
                r.components,
                r.large_components,
                sig12(r.seconds)
            )?;
        }
        Ok(())
    })?;
    Manifest::new(
        "sweep",
        &args.pipeline.input,
        SweepParamsOut {
            sigmas,
            similarity,
            min_cluster_size: args.pipeline.min_cluster_size,
            with_extraction: params.with_extraction,
            time_unit: unit,
        },
        &["sweep.csv"],
    )?
    .commit(dir)
}

// ---------------------------------------------------------------------------
// stats
// ---------------------------------------------------------------------------

fn load_labels(path: &Path, edge_count: usize) -> Result<Clustering, CliError> {
    let reader = open_input(path)?;
    let mut labels: Vec<Option<u32>> = vec![None; edge_count];
    let mut seen = vec![false; edge_count];
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split('\t');
        let bad = || {
            CliError::input(format!(
                "{} line {}: expected edge_id<TAB>label",
                path.display(),
                lineno + 1
            ))
        };
        let edge: usize = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let label: i64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        if edge >= edge_count || seen[edge] {
            return Err(CliError::input(format!(
                "{} line {}: edge id {edge} out of range or repeated",
                path.display(),
                lineno + 1
            )));
        }
        seen[edge] = true;
        labels[edge] = (label >= 0).then_some(label as u32);
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(CliError::input(format!(
            "{}: no label for edge {missing}",
            path.display()
        )));
    }
    Clustering::from_labels(labels).map_err(|e| CliError::input(e.to_string()))
}

#[derive(Serialize)]
struct StatsOut {
    clusters: usize,
    outlier_fraction: f64,
    degree_cluster_pearson: Option<f64>,
    zero_cluster_author_fraction: f64,
    global_subjects: u32,
    global_categories: u32,
}

pub fn stats(args: StatsArgs) -> Result<(), CliError> {
    let unit = parse_time_unit(&args.time_unit)?;
    let h = load_jsonl(&args.input)?.normalize_times(unit)?;
    let clustering = load_labels(&args.labels, h.edge_count())?;

    let reports = cluster_stats(&h, &clustering);
    let projection = project_to_vertices(&h, &clustering);
    let diversity = topic_diversity(&h, &clustering);
    let pearson = match degree_cluster_correlation(&projection) {
        Ok(r) => Some(r),
        Err(e) => {
            log::warn!("degree-cluster correlation unavailable: {e}");
            None
        }
    };

    let dir = &args.out;
    write_json(dir, "report.json", &reports)?;
    write_atomic(dir, "projection.tsv", |w| {
        for v in 0..h.vertex_count() as u32 {
            let clusters = &projection.clusters[v as usize];
            let joined = clusters
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",");
            writeln!(w, "{v}\t{joined}")?;
        }
        Ok(())
    })?;
    write_json(dir, "topic_diversity.json", &diversity)?;
    write_json(
        dir,
        "stats.json",
        &StatsOut {
            clusters: clustering.cluster_count(),
            outlier_fraction: clustering.outlier_fraction(),
            degree_cluster_pearson: pearson,
            zero_cluster_author_fraction: projection.zero_cluster_fraction(),
            global_subjects: diversity.global_subjects,
            global_categories: diversity.global_categories,
        },
    )?;
    #[derive(Serialize)]
    struct StatsParams {
        labels: String,
        time_unit: TimeUnit,
    }
    Manifest::new(
        "stats",
        &args.input,
        StatsParams {
            labels: args.labels.display().to_string(),
            time_unit: unit,
        },
        &["report.json", "projection.tsv", "topic_diversity.json", "stats.json"],
    )?
    .commit(dir)
}

// ---------------------------------------------------------------------------
// export-distances
// ---------------------------------------------------------------------------

pub fn export_distances(args: ExportDistancesArgs) -> Result<(), CliError> {
    let kind = args.kind.parse::<DistributionKind>()?;
    let unit = parse_time_unit(&args.time_unit)?;
    let h = load_jsonl(&args.input)?.normalize_times(unit)?;
    let clustering = load_labels(&args.labels, h.edge_count())?;
    let reports = cluster_stats(&h, &clustering);
    let matrix = distribution_matrix(&reports, kind)?;

    let dir = &args.out;
    write_atomic(dir, "distances.csv", |w| {
        let header = matrix
            .cluster_ids
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",");
        writeln!(w, "{header}")?;
        let n = matrix.len();
        for i in 0..n {
            let row = (0..n)
                .map(|j| sig12(matrix.get(i, j)))
                .collect::<Vec<_>>()
                .join(",");
            writeln!(w, "{row}")?;
        }
        Ok(())
    })?;
    #[derive(Serialize)]
    struct ExportParams {
        labels: String,
        kind: DistributionKind,
        time_unit: TimeUnit,
    }
    Manifest::new(
        "export-distances",
        &args.input,
        ExportParams {
            labels: args.labels.display().to_string(),
            kind,
            time_unit: unit,
        },
        &["distances.csv"],
    )?
    .commit(dir)
}
