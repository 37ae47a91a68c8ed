//! `hyperline` — cluster the hyperedges of a temporal hypergraph.
//!
//! Subcommands: `ingest` (clean a raw dump), `cluster` (full extraction),
//! `sweep` (line-graph diagnostics over a sigma list), `stats`
//! (post-clustering reports), `export-distances` (pairwise Hellinger
//! matrix). Exit codes: 0 success, 2 input/schema error, 3 parameter error,
//! 4 internal error.

mod commands;
mod output;

use std::collections::HashMap;
use std::path::PathBuf;

use clap::parser::ValueSource;
use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand};

use hyperline_core::Error as CoreError;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    pub fn parameter(message: impl Into<String>) -> Self {
        CliError {
            code: 3,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError {
            code: 4,
            message: message.into(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let code = match &e {
            CoreError::Parse { .. }
            | CoreError::Schema { .. }
            | CoreError::DuplicateId { .. }
            | CoreError::Time { .. }
            | CoreError::UnknownVertex(_) => 2,
            CoreError::Parameter(_) => 3,
            _ => 4,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::internal(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "hyperline", version, about = "Temporal hyperedge clustering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Clean a raw dump: drop project-author vertices and emptied edges.
    Ingest(IngestArgs),
    /// Run the full clustering pipeline and write reports.
    Cluster(ClusterArgs),
    /// Line-graph size/component diagnostics over an ascending sigma list.
    Sweep(SweepArgs),
    /// Recompute per-cluster statistics from a labels file.
    Stats(StatsArgs),
    /// Pairwise Hellinger distances between cluster distributions.
    ExportDistances(ExportDistancesArgs),
}

#[derive(Args)]
struct IngestArgs {
    /// Raw JSON Lines input (one record per line).
    #[arg(long, conflicts_with_all = ["csv_edges", "csv_incidence"])]
    input: Option<PathBuf>,
    /// Edge table of the two-file CSV form (id,time,labels).
    #[arg(long, requires = "csv_incidence")]
    csv_edges: Option<PathBuf>,
    /// Incidence table of the two-file CSV form (edge_id,member).
    #[arg(long, requires = "csv_edges")]
    csv_incidence: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Vertices whose normalized name starts with this prefix are removed.
    #[arg(long, default_value = "n/a")]
    clean_prefix: String,
}

#[derive(Args, Clone)]
struct PipelineArgs {
    /// Cleaned JSON Lines input.
    #[arg(long)]
    input: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Structural similarity: jaccard, simplicial, or size-filtered.
    #[arg(long, default_value = "jaccard")]
    similarity: String,
    /// Size filter slack ratio (size-filtered similarity only).
    #[arg(long, default_value_t = 1.1)]
    slack_ratio: f64,
    /// Size filter slack offset (size-filtered similarity only).
    #[arg(long, default_value_t = 2.0)]
    slack_offset: f64,
    /// Smallest cluster the extraction may emit.
    #[arg(long, default_value_t = 10)]
    min_cluster_size: usize,
    /// Unit for normalized edge times: days, seconds, or months.
    #[arg(long, default_value = "days")]
    time_unit: String,
    /// Allow a whole line-graph component to be one cluster.
    #[arg(long, default_value_t = false)]
    allow_single_root: bool,
    /// Skip candidate generation for vertices with more incident edges.
    #[arg(long)]
    max_vertex_degree: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Optional key=value config file; flags take precedence over it.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ClusterArgs {
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Time kernel width, in time units (required; no sensible default).
    #[arg(long)]
    sigma: Option<f64>,
    /// Dump the weighted line graph as CSV.
    #[arg(long, default_value_t = false)]
    dump_line_graph: bool,
    /// Dump the single-linkage merge sequence as CSV.
    #[arg(long, default_value_t = false)]
    dump_dendrogram: bool,
    /// Dump the condensed tree as CSV.
    #[arg(long, default_value_t = false)]
    dump_condensed: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Comma-separated ascending sigma list.
    #[arg(long)]
    sigmas: Option<String>,
    /// Only build the line graph and components; skip the clustering.
    #[arg(long, default_value_t = false)]
    no_extract: bool,
}

#[derive(Args)]
struct StatsArgs {
    /// Cleaned JSON Lines input the labels refer to.
    #[arg(long)]
    input: PathBuf,
    /// labels.tsv produced by `cluster`.
    #[arg(long)]
    labels: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Unit for normalized edge times.
    #[arg(long, default_value = "days")]
    time_unit: String,
}

#[derive(Args)]
struct ExportDistancesArgs {
    /// Cleaned JSON Lines input the labels refer to.
    #[arg(long)]
    input: PathBuf,
    /// labels.tsv produced by `cluster`.
    #[arg(long)]
    labels: PathBuf,
    /// Which per-cluster distribution to compare: topics or authors.
    #[arg(long)]
    kind: String,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Unit for normalized edge times.
    #[arg(long, default_value = "days")]
    time_unit: String,
}

/// Fills pipeline fields from a key=value config file wherever the command
/// line did not set them explicitly (precedence: flags > file > defaults).
fn apply_config(
    args: &mut PipelineArgs,
    sigma: Option<&mut Option<f64>>,
    matches: &ArgMatches,
) -> Result<(), CliError> {
    let Some(path) = &args.config else {
        return Ok(());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::parameter(format!("config {}: {e}", path.display())))?;
    let mut values: HashMap<&str, &str> = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::parameter(format!(
                "config {} line {}: expected key=value",
                path.display(),
                lineno + 1
            )));
        };
        values.insert(key.trim(), value.trim());
    }

    let from_cli = |name: &str| matches.value_source(name) == Some(ValueSource::CommandLine);
    let parse_err = |key: &str, v: &str| {
        CliError::parameter(format!("config key {key}: cannot parse value {v:?}"))
    };

    if let Some(sigma) = sigma {
        if sigma.is_none() {
            if let Some(v) = values.get("sigma") {
                *sigma = Some(v.parse().map_err(|_| parse_err("sigma", v))?);
            }
        }
    }
    if !from_cli("similarity") {
        if let Some(v) = values.get("similarity") {
            args.similarity = v.to_string();
        }
    }
    if !from_cli("slack_ratio") {
        if let Some(v) = values.get("slack-ratio").or(values.get("slack_ratio")) {
            args.slack_ratio = v.parse().map_err(|_| parse_err("slack-ratio", v))?;
        }
    }
    if !from_cli("slack_offset") {
        if let Some(v) = values.get("slack-offset").or(values.get("slack_offset")) {
            args.slack_offset = v.parse().map_err(|_| parse_err("slack-offset", v))?;
        }
    }
    if !from_cli("min_cluster_size") {
        if let Some(v) = values
            .get("min-cluster-size")
            .or(values.get("min_cluster_size"))
        {
            args.min_cluster_size = v.parse().map_err(|_| parse_err("min-cluster-size", v))?;
        }
    }
    if !from_cli("time_unit") {
        if let Some(v) = values.get("time-unit").or(values.get("time_unit")) {
            args.time_unit = v.to_string();
        }
    }
    if !from_cli("allow_single_root") {
        if let Some(v) = values
            .get("allow-single-root")
            .or(values.get("allow_single_root"))
        {
            args.allow_single_root = v.parse().map_err(|_| parse_err("allow-single-root", v))?;
        }
    }
    if !from_cli("max_vertex_degree") && args.max_vertex_degree.is_none() {
        if let Some(v) = values
            .get("max-vertex-degree")
            .or(values.get("max_vertex_degree"))
        {
            args.max_vertex_degree = Some(v.parse().map_err(|_| parse_err("max-vertex-degree", v))?);
        }
    }
    if !from_cli("workers") && args.workers.is_none() {
        if let Some(v) = values.get("workers") {
            args.workers = Some(v.parse().map_err(|_| parse_err("workers", v))?);
        }
    }
    Ok(())
}

fn run() -> Result<(), CliError> {
    let matches = Cli::command().try_get_matches().unwrap_or_else(|e| {
        // --help/--version exit 0; usage mistakes are parameter errors.
        let code = if e.use_stderr() { 3 } else { 0 };
        let _ = e.print();
        std::process::exit(code);
    });
    let cli = Cli::from_arg_matches(&matches).map_err(|e| CliError::parameter(e.to_string()))?;
    match cli.command {
        Command::Ingest(args) => commands::ingest(args),
        Command::Cluster(mut args) => {
            let sub = matches.subcommand_matches("cluster").expect("subcommand");
            apply_config(&mut args.pipeline, Some(&mut args.sigma), sub)?;
            hyperline_core::configure_thread_pool(args.pipeline.workers);
            commands::cluster(args)
        }
        Command::Sweep(mut args) => {
            let sub = matches.subcommand_matches("sweep").expect("subcommand");
            apply_config(&mut args.pipeline, None, sub)?;
            hyperline_core::configure_thread_pool(args.pipeline.workers);
            commands::sweep(args)
        }
        Command::Stats(args) => commands::stats(args),
        Command::ExportDistances(args) => commands::export_distances(args),
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .format_target(false)
        .init();
    if let Err(e) = run() {
        eprintln!("error: {}", e.message);
        std::process::exit(e.code);
    }
}
