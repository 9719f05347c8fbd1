//! `npdi-graph`: build knowledge-graph snapshots and query them.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use npdi_graph::query::QueryOptions;

use commands::{Context, StatsArgs, UsageError};
use config::{ClosureScope, RunConfig};

#[derive(Parser)]
#[command(
    name = "npdi-graph",
    version,
    about = "Build and query natural product-drug interaction knowledge graphs"
)]
struct Cli {
    /// TOML run configuration; relative paths inside resolve against its directory.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Follow edges from subject to object only (the default).
    #[arg(long, global = true, conflicts_with = "undirected")]
    directed: bool,

    /// Let paths traverse edges in either direction.
    #[arg(long, global = true)]
    undirected: bool,

    /// Ignore evidence published after this year.
    #[arg(long, global = true, value_name = "YEAR")]
    year_cutoff: Option<i32>,

    /// Snapshot directory for `build`; report directory for every other command.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Snapshot to query (defaults to `snapshot` or `out` from the config).
    #[arg(long, global = true, value_name = "DIR")]
    snapshot: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ingest, close and write a snapshot with ingestion and closure reports.
    Build {
        /// Which graph the closure rules run over.
        #[arg(long, value_enum)]
        closure: Option<ClosureScope>,
        /// Create placeholder nodes for unknown edge endpoints instead of failing.
        #[arg(long)]
        lenient_endpoints: bool,
    },
    /// Node and edge counts, average degree and density.
    Stats(StatsCmd),
    /// Direct edges and the shortest path between two nodes.
    Path {
        #[arg(long, value_name = "NODE", requires = "dst")]
        src: Option<String>,
        #[arg(long, value_name = "NODE", requires = "src")]
        dst: Option<String>,
        /// TSV of `source<TAB>target` lines, one query each.
        #[arg(long, value_name = "FILE", conflicts_with_all = ["src", "dst"])]
        pairs: Option<PathBuf>,
    },
    /// Enzymes and transporters linking natural products to a drug.
    Metapath {
        /// Natural-product nodes, comma separated (ids or labels).
        #[arg(long, value_name = "NODES", value_delimiter = ',', required = true)]
        np: Vec<String>,
        #[arg(long, value_name = "NODE")]
        drug: String,
        /// TSV `node_id<TAB>kind` with kind ENZYME or TRANSPORTER.
        #[arg(long, value_name = "FILE")]
        targets: Option<PathBuf>,
    },
    /// Classify ground-truth assertions against the graph.
    Evaluate {
        #[arg(long, value_name = "FILE")]
        ground_truth: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        polarity: Option<PathBuf>,
    },
    /// Pairs of opposite-polarity edges between the same nodes.
    Contradictions {
        #[arg(long, value_name = "FILE")]
        polarity: Option<PathBuf>,
    },
    /// Inferred edges in the snapshot, counted by relation.
    ClosureReport {
        /// Also list every inferred edge with its premises.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Args)]
struct StatsCmd {
    /// Compute from a node count instead of a snapshot.
    #[arg(long, requires = "edges")]
    nodes: Option<u64>,
    #[arg(long, requires = "nodes")]
    edges: Option<u64>,
    /// Snapshot to compare against (percent change).
    #[arg(long, value_name = "DIR", conflicts_with = "baseline_nodes")]
    baseline: Option<PathBuf>,
    #[arg(long, requires = "baseline_edges")]
    baseline_nodes: Option<u64>,
    #[arg(long, requires = "baseline_nodes")]
    baseline_edges: Option<u64>,
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::defaults(),
    };
    if cli.directed {
        cfg.directed = true;
    }
    if cli.undirected {
        cfg.directed = false;
    }
    if cli.year_cutoff.is_some() {
        cfg.year_cutoff = cli.year_cutoff;
    }
    if let Command::Build {
        closure,
        lenient_endpoints,
    } = &cli.command
    {
        if let Some(scope) = closure {
            cfg.closure = *scope;
        }
        if *lenient_endpoints {
            cfg.strict_endpoints = false;
        }
    }
    let opts = QueryOptions {
        directed: cfg.directed,
        year_cutoff: cfg.year_cutoff,
    };
    let ctx = Context {
        cfg,
        opts,
        out: cli.out,
        snapshot: cli.snapshot,
    };
    match &cli.command {
        Command::Build { .. } => commands::build(&ctx),
        Command::Stats(s) => commands::stats(
            &ctx,
            &StatsArgs {
                counts: s.nodes.zip(s.edges),
                baseline: s.baseline.clone(),
                baseline_counts: s.baseline_nodes.zip(s.baseline_edges),
            },
        ),
        Command::Path { src, dst, pairs } => {
            commands::path(&ctx, src.as_deref(), dst.as_deref(), pairs.as_deref())
        }
        Command::Metapath { np, drug, targets } => {
            commands::metapath(&ctx, np, drug, targets.as_deref())
        }
        Command::Evaluate {
            ground_truth,
            polarity,
        } => commands::evaluate(&ctx, ground_truth.as_deref(), polarity.as_deref()),
        Command::Contradictions { polarity } => commands::contradictions(&ctx, polarity.as_deref()),
        Command::ClosureReport { list } => commands::closure_report(&ctx, *list),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
