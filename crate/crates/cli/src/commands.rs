use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context as _, Result};
use npdi_graph::closure::{close_in_place, ClosureConfig, ClosureReport};
use npdi_graph::eval::{
    classify_all, find_contradictory_edge_pairs, parse_ground_truth_file, summarize_evaluation,
    CongruenceVerdict, EvaluationSummary, PolarityTable,
};
use npdi_graph::ingest::{
    build_curated_graph, build_literature_graph, parse_predication_file, EntityMap, FilterConfig,
    IngestReport, RelationMap,
};
use npdi_graph::query::{
    direct_edges, find_metapaths, shortest_path, time_slice, MetaPathResult, MetaPathTemplate,
    PathResult, QueryOptions, TargetSet,
};
use npdi_graph::snapshot::{read_snapshot, write_snapshot, Manifest};
use npdi_graph::{
    merge_graphs, percent_change, EdgeRecord, GraphStats, KnowledgeGraph, PercentChange,
};
use serde::Serialize;

use crate::config::{ClosureScope, RunConfig};

/// Bad invocation rather than bad data; maps to exit code 1.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub struct Context {
    pub cfg: RunConfig,
    pub opts: QueryOptions,
    /// Report directory (query commands) or snapshot directory (build).
    pub out: Option<PathBuf>,
    pub snapshot: Option<PathBuf>,
}

impl Context {
    fn snapshot_dir(&self) -> Result<&Path> {
        self.snapshot
            .as_deref()
            .or(self.cfg.snapshot.as_deref())
            .or(self.cfg.out.as_deref())
            .ok_or_else(|| {
                usage(
                    "no snapshot directory: pass --snapshot or set `snapshot`/`out` in the config",
                )
            })
    }

    fn load(&self) -> Result<(KnowledgeGraph, Manifest)> {
        let dir = self.snapshot_dir()?;
        log::info!("loading snapshot {}", dir.display());
        Ok(read_snapshot(dir)?)
    }

    /// Prints `value` as pretty JSON and, with `--out`, also writes `<out>/<name>.json`.
    fn emit<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        print!("{text}");
        if let Some(dir) = &self.out {
            write_file(&dir.join(format!("{name}.json")), &text)?;
        }
        Ok(())
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("{}: cannot create directory", parent.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("{}: cannot write", path.display()))
}

/// Resolves a node argument by exact id, then by unique case-insensitive label.
pub fn resolve_node(g: &KnowledgeGraph, arg: &str) -> Result<String> {
    if g.node(arg).is_some() {
        return Ok(arg.to_string());
    }
    let wanted = arg.to_lowercase();
    let mut hits: Vec<&str> = g
        .nodes()
        .filter(|n| n.label.to_lowercase() == wanted)
        .map(|n| n.id.as_str())
        .collect();
    hits.sort_unstable();
    match hits.as_slice() {
        [one] => Ok(one.to_string()),
        [] => bail!("unknown node `{arg}`"),
        many => bail!("ambiguous node `{arg}`: matches {}", many.join(", ")),
    }
}

fn polarity(path: Option<&Path>) -> Result<PolarityTable> {
    Ok(match path {
        Some(p) => PolarityTable::from_file(p)?,
        None => PolarityTable::builtin(),
    })
}

// ---- build ----------------------------------------------------------------

#[derive(Serialize)]
struct ClosureSummary<'a> {
    scope: ClosureScope,
    rules: &'a ClosureConfig,
    #[serde(flatten)]
    report: ClosureReport,
}

#[derive(Serialize)]
struct BuildSummary<'a> {
    manifest: &'a Manifest,
    ingest: &'a IngestReport,
    closure: &'a ClosureSummary<'a>,
}

pub const INGEST_REPORT: &str = "ingest_report.json";
pub const CLOSURE_REPORT: &str = "closure_report.json";

pub fn build(ctx: &Context) -> Result<()> {
    let cfg = &ctx.cfg;
    let out = ctx.out.as_deref().or(cfg.out.as_deref()).ok_or_else(|| {
        usage("build needs an output directory: pass --out or set `out` in the config")
    })?;
    if cfg.nodes.is_empty() && cfg.predications.is_empty() {
        return Err(usage(
            "nothing to build: the config lists no node files and no predication files",
        ));
    }
    for p in cfg.build_inputs() {
        if !p.exists() {
            bail!("{}: input file not found", p.display());
        }
    }

    let relations = match &cfg.relation_map {
        Some(p) => RelationMap::from_file(p)?,
        None => RelationMap::builtin(),
    };
    let registry = relations.registry();
    let nodes: Vec<&Path> = cfg.nodes.iter().map(PathBuf::as_path).collect();
    let edges: Vec<&Path> = cfg.edges.iter().map(PathBuf::as_path).collect();
    let mut curated = build_curated_graph(registry, &nodes, &edges, cfg.strict_endpoints)?;

    let mut predications = Vec::new();
    for p in &cfg.predications {
        predications.extend(parse_predication_file(p)?);
    }
    let entities = match &cfg.entity_map {
        Some(p) => EntityMap::from_file(p)?,
        None => EntityMap::default(),
    };
    let filter = match &cfg.filters {
        Some(p) => FilterConfig::from_path(p)?,
        None => FilterConfig::builtin(),
    };
    let (mut literature, ingest) =
        build_literature_graph(&predications, &relations, &entities, &filter);
    log::info!(
        "curated: {} nodes, {} edges; literature: {} nodes, {} edges",
        curated.node_count(),
        curated.edge_count(),
        literature.node_count(),
        literature.edge_count()
    );

    if let Some(year) = cfg.year_cutoff {
        curated = time_slice(&curated, year);
        literature = time_slice(&literature, year);
    }

    let rules = match &cfg.closure_rules {
        Some(p) => ClosureConfig::from_file(p)?,
        None => ClosureConfig::default(),
    };
    let (graph, report) = match cfg.closure {
        ClosureScope::Literature => {
            let report = close_in_place(&mut literature, &rules);
            (merge_graphs(&curated, &literature)?, report)
        }
        ClosureScope::Merged => {
            let mut g = merge_graphs(&curated, &literature)?;
            let report = close_in_place(&mut g, &rules);
            (g, report)
        }
        ClosureScope::None => (
            merge_graphs(&curated, &literature)?,
            ClosureReport::default(),
        ),
    };
    let closure = ClosureSummary {
        scope: cfg.closure,
        rules: &rules,
        report,
    };

    let manifest = write_snapshot(&graph, out, Some(cfg.hash()))?;
    write_file(
        &out.join(INGEST_REPORT),
        &(serde_json::to_string_pretty(&ingest)? + "\n"),
    )?;
    write_file(
        &out.join(CLOSURE_REPORT),
        &(serde_json::to_string_pretty(&closure)? + "\n"),
    )?;
    let summary = BuildSummary {
        manifest: &manifest,
        ingest: &ingest,
        closure: &closure,
    };
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

// ---- stats ----------------------------------------------------------------

#[derive(Serialize)]
struct StatsReport {
    #[serde(flatten)]
    stats: GraphStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    negated_edge_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    inferred_edge_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    year_cutoff: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    baseline: Option<GraphStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    percent_change: Option<PercentChange>,
}

pub struct StatsArgs {
    pub counts: Option<(u64, u64)>,
    pub baseline: Option<PathBuf>,
    pub baseline_counts: Option<(u64, u64)>,
}

pub fn stats(ctx: &Context, args: &StatsArgs) -> Result<()> {
    let cutoff = ctx.opts.year_cutoff;
    let sliced = |g: KnowledgeGraph| match cutoff {
        Some(y) => time_slice(&g, y),
        None => g,
    };
    let mut report = match args.counts {
        Some((n, e)) => StatsReport {
            stats: GraphStats::from_counts(n, e),
            negated_edge_count: None,
            inferred_edge_count: None,
            year_cutoff: None,
            baseline: None,
            percent_change: None,
        },
        None => {
            let g = sliced(ctx.load()?.0);
            StatsReport {
                stats: g.compute_stats(),
                negated_edge_count: Some(g.negated_edge_count()),
                inferred_edge_count: Some(g.inferred_edge_count()),
                year_cutoff: cutoff,
                baseline: None,
                percent_change: None,
            }
        }
    };
    let baseline = match (&args.baseline, args.baseline_counts) {
        (Some(dir), _) => Some(sliced(read_snapshot(dir)?.0).compute_stats()),
        (None, Some((n, e))) => Some(GraphStats::from_counts(n, e)),
        (None, None) => None,
    };
    if let Some(b) = baseline {
        report.percent_change = Some(percent_change(&b, &report.stats)?);
        report.baseline = Some(b);
    }
    ctx.emit("stats", &report)
}

// ---- path -----------------------------------------------------------------

#[derive(Serialize)]
struct PathReport {
    source: String,
    target: String,
    directed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    year_cutoff: Option<i32>,
    direct_edges: Vec<EdgeRecord>,
    path: Option<PathResult>,
}

fn path_report(
    g: &KnowledgeGraph,
    src: &str,
    dst: &str,
    opts: &QueryOptions,
) -> Result<PathReport> {
    let (source, target) = (resolve_node(g, src)?, resolve_node(g, dst)?);
    Ok(PathReport {
        direct_edges: direct_edges(g, &source, &target, opts)?,
        path: shortest_path(g, &source, &target, opts)?,
        source,
        target,
        directed: opts.directed,
        year_cutoff: opts.year_cutoff,
    })
}

pub fn path(
    ctx: &Context,
    src: Option<&str>,
    dst: Option<&str>,
    pairs: Option<&Path>,
) -> Result<()> {
    let (g, _) = ctx.load()?;
    match (src, dst, pairs) {
        (Some(s), Some(d), None) => ctx.emit("path", &path_report(&g, s, d, &ctx.opts)?),
        (None, None, Some(file)) => {
            let text = std::fs::read_to_string(file)
                .with_context(|| format!("{}: cannot read", file.display()))?;
            let mut reports = Vec::new();
            for (i, line) in text.lines().enumerate() {
                if line.trim().is_empty() || line.starts_with('#') {
                    continue;
                }
                let (s, d) = line.split_once('\t').ok_or_else(|| {
                    anyhow!("{}:{}: expected `source<TAB>target`", file.display(), i + 1)
                })?;
                let r = path_report(&g, s.trim(), d.trim(), &ctx.opts)
                    .with_context(|| format!("{}:{}", file.display(), i + 1))?;
                reports.push(r);
            }
            ctx.emit("path", &reports)
        }
        _ => Err(usage("path needs --src and --dst, or --pairs")),
    }
}

// ---- metapath -------------------------------------------------------------

#[derive(Serialize)]
struct MetaPathReport {
    directed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    year_cutoff: Option<i32>,
    #[serde(flatten)]
    result: MetaPathResult,
    labels: BTreeMap<String, String>,
}

pub fn metapath(ctx: &Context, np: &[String], drug: &str, targets: Option<&Path>) -> Result<()> {
    if np.is_empty() {
        return Err(usage("metapath needs at least one --np node"));
    }
    let targets_path = targets.or(ctx.cfg.targets.as_deref()).ok_or_else(|| {
        usage("metapath needs a target list: pass --targets or set `targets` in the config")
    })?;
    let targets = TargetSet::from_file(targets_path)?;
    let (g, _) = ctx.load()?;
    let np_ids = np
        .iter()
        .map(|a| resolve_node(&g, a))
        .collect::<Result<Vec<_>>>()?;
    let drug = resolve_node(&g, drug)?;
    let np_refs: Vec<&str> = np_ids.iter().map(String::as_str).collect();
    let result = find_metapaths(
        &g,
        &np_refs,
        &drug,
        &MetaPathTemplate::defaults(),
        &targets,
        &ctx.opts,
    )?;
    let labels = result
        .np_nodes
        .iter()
        .chain([&result.drug])
        .chain(&result.enzymes)
        .chain(&result.transporters)
        .filter_map(|id| g.node(id).map(|n| (id.clone(), n.label.clone())))
        .collect();
    ctx.emit(
        "metapath",
        &MetaPathReport {
            directed: ctx.opts.directed,
            year_cutoff: ctx.opts.year_cutoff,
            result,
            labels,
        },
    )
}

// ---- evaluate -------------------------------------------------------------

#[derive(Serialize)]
struct EvaluationReport {
    directed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    year_cutoff: Option<i32>,
    summary: EvaluationSummary,
    verdicts: Vec<CongruenceVerdict>,
}

fn tag<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        other => format!("{other:?}"),
    }
}

pub fn evaluate(
    ctx: &Context,
    ground_truth: Option<&Path>,
    polarity_file: Option<&Path>,
) -> Result<()> {
    let gt_path = ground_truth
        .or(ctx.cfg.ground_truth.as_deref())
        .ok_or_else(|| usage("evaluate needs assertions: pass --ground-truth or set `ground_truth` in the config"))?;
    let assertions = parse_ground_truth_file(gt_path)?;
    let pol = polarity(polarity_file.or(ctx.cfg.polarity.as_deref()))?;
    let (g, _) = ctx.load()?;
    let verdicts = classify_all(&g, &assertions, &pol, &ctx.opts);
    let report = EvaluationReport {
        directed: ctx.opts.directed,
        year_cutoff: ctx.opts.year_cutoff,
        summary: summarize_evaluation(&verdicts),
        verdicts,
    };
    if let Some(dir) = &ctx.out {
        let mut tsv = String::from("np_node\ttarget_node\tinteraction\tverdict\tbasis\n");
        for v in &report.verdicts {
            tsv.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                v.assertion.np_node,
                v.assertion.target_node,
                tag(&v.assertion.interaction),
                v.verdict,
                tag(&v.basis)
            ));
        }
        write_file(&dir.join("evaluate.tsv"), &tsv)?;
    }
    ctx.emit("evaluate", &report)
}

// ---- contradictions -------------------------------------------------------

#[derive(Serialize)]
struct ContradictionPair {
    negative: EdgeRecord,
    positive: EdgeRecord,
}

#[derive(Serialize)]
struct ContradictionReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    year_cutoff: Option<i32>,
    count: usize,
    pairs: Vec<ContradictionPair>,
}

pub fn contradictions(ctx: &Context, polarity_file: Option<&Path>) -> Result<()> {
    let pol = polarity(polarity_file.or(ctx.cfg.polarity.as_deref()))?;
    let (mut g, _) = ctx.load()?;
    if let Some(y) = ctx.opts.year_cutoff {
        g = time_slice(&g, y);
    }
    let pairs: Vec<ContradictionPair> = find_contradictory_edge_pairs(&g, &pol)
        .into_iter()
        .map(|(negative, positive)| ContradictionPair { negative, positive })
        .collect();
    ctx.emit(
        "contradictions",
        &ContradictionReport {
            year_cutoff: ctx.opts.year_cutoff,
            count: pairs.len(),
            pairs,
        },
    )
}

// ---- closure-report -------------------------------------------------------

#[derive(Serialize)]
struct InferredSummary {
    total_inferred: usize,
    inferred_by_relation: BTreeMap<String, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    edges: Option<Vec<EdgeRecord>>,
}

pub fn closure_report(ctx: &Context, list: bool) -> Result<()> {
    let (g, _) = ctx.load()?;
    let inferred: Vec<EdgeRecord> = g
        .canonical_edges()
        .into_iter()
        .filter(|e| {
            !e.negated
                && g.edge(&e.subject, &e.relation.id, &e.object)
                    .is_some_and(|r| r.is_inferred())
        })
        .collect();
    let mut by_relation = BTreeMap::new();
    for e in &inferred {
        *by_relation.entry(e.relation.id.clone()).or_insert(0) += 1;
    }
    ctx.emit(
        "closure_report",
        &InferredSummary {
            total_inferred: inferred.len(),
            inferred_by_relation: by_relation,
            edges: list.then_some(inferred),
        },
    )
}
