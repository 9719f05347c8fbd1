//! Forward-chaining symmetric and transitive closure.
//!
//! Each configured relation is closed independently with semi-naive
//! iteration: a round only joins the facts derived in the previous round
//! against the full fact set, so every pair of premises is considered exactly
//! once. Rules never read or write negated edges.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{EvidenceRecord, KnowledgeGraph, NodeIdx, RelIdx};
use crate::ingest::tsv;
use crate::par;

pub const SYMMETRIC_DEFAULTS: [&str; 2] = ["RO_0002434", "RO_0002436"];
pub const TRANSITIVE_DEFAULTS: [&str; 3] = ["BFO_0000050", "BFO_0000063", "RO_0002213"];

/// Relation ids closed under symmetry and under transitivity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosureConfig {
    pub symmetric: BTreeSet<String>,
    pub transitive: BTreeSet<String>,
}

impl Default for ClosureConfig {
    fn default() -> Self {
        ClosureConfig {
            symmetric: SYMMETRIC_DEFAULTS.iter().map(|s| s.to_string()).collect(),
            transitive: TRANSITIVE_DEFAULTS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl ClosureConfig {
    pub fn empty() -> Self {
        ClosureConfig {
            symmetric: BTreeSet::new(),
            transitive: BTreeSet::new(),
        }
    }

    /// TSV with header `relation_id\trule`, rule `SYMMETRIC` or `TRANSITIVE`.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = tsv::read_to_string(path)?;
        let mut cfg = ClosureConfig::empty();
        for row in tsv::rows(path, &text, &["relation_id", "rule"], 2)? {
            let id = row
                .opt(0)
                .ok_or_else(|| Error::parse(path, row.line, "empty relation_id"))?
                .to_string();
            match row.get(1).trim().to_ascii_uppercase().as_str() {
                "SYMMETRIC" => cfg.symmetric.insert(id),
                "TRANSITIVE" => cfg.transitive.insert(id),
                other => {
                    return Err(Error::parse(
                        path,
                        row.line,
                        format!("unknown rule `{other}`"),
                    ))
                }
            };
        }
        Ok(cfg)
    }

    fn relations(&self) -> BTreeSet<&str> {
        self.symmetric
            .iter()
            .chain(&self.transitive)
            .map(String::as_str)
            .collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClosureReport {
    /// Newly inferred edges per relation id.
    pub inferred_by_relation: BTreeMap<String, usize>,
    pub total_inferred: usize,
    /// Largest number of productive rounds over all relations.
    pub rounds: usize,
}

/// Returns `g` plus every edge entailed by the configured rules.
pub fn apply_closure(g: &KnowledgeGraph, cfg: &ClosureConfig) -> KnowledgeGraph {
    let mut out = g.clone();
    close_in_place(&mut out, cfg);
    out
}

/// Closes `g` in place. Relations in `cfg` that are not registered in the
/// graph's registry are skipped.
pub fn close_in_place(g: &mut KnowledgeGraph, cfg: &ClosureConfig) -> ClosureReport {
    let registry = g.registry().clone();
    // id order of nodes; premise choice must not depend on insertion order
    let rank = node_ranks(g);
    let mut report = ClosureReport::default();
    for id in cfg.relations() {
        let Some(rel) = registry.index_of(id) else {
            log::warn!("closure relation `{id}` is not registered; skipped");
            continue;
        };
        let rule = Rule {
            symmetric: cfg.symmetric.contains(id),
            transitive: cfg.transitive.contains(id),
        };
        let (added, rounds) = close_relation(g, rel, rule, &rank);
        report.rounds = report.rounds.max(rounds);
        report.total_inferred += added;
        report.inferred_by_relation.insert(id.to_string(), added);
    }
    report
}

/// Number of main edges whose evidence is entirely inferred.
pub fn count_inferred(g: &KnowledgeGraph) -> usize {
    g.inferred_edge_count()
}

#[derive(Clone, Copy)]
struct Rule {
    symmetric: bool,
    transitive: bool,
}

type Pair = (u32, u32);
/// (conclusion, first premise, optional second premise)
type Derivation = (Pair, Pair, Option<Pair>);

fn node_ranks(g: &KnowledgeGraph) -> Vec<u32> {
    let mut order: Vec<u32> = (0..g.node_count() as u32).collect();
    order.sort_unstable_by(|&a, &b| g.id_of(NodeIdx(a)).cmp(g.id_of(NodeIdx(b))));
    let mut rank = vec![0u32; order.len()];
    for (r, &n) in order.iter().enumerate() {
        rank[n as usize] = r as u32;
    }
    rank
}

fn close_relation(g: &mut KnowledgeGraph, rel: RelIdx, rule: Rule, rank: &[u32]) -> (usize, usize) {
    let mut facts: FxHashSet<Pair> = FxHashSet::default();
    let mut out: FxHashMap<u32, Vec<u32>> = FxHashMap::default();
    let mut inc: FxHashMap<u32, Vec<u32>> = FxHashMap::default();
    for e in g.raw_edges().iter().filter(|e| e.relation == rel) {
        let p = (e.subject.0, e.object.0);
        if facts.insert(p) {
            out.entry(p.0).or_default().push(p.1);
            inc.entry(p.1).or_default().push(p.0);
        }
    }
    let mut delta: Vec<Pair> = facts.iter().copied().collect();
    delta.sort_unstable();

    let by_rank = |p: Pair| (rank[p.0 as usize], rank[p.1 as usize]);
    let mut added = 0;
    let mut rounds = 0;
    loop {
        let mut derived: Vec<Derivation> = par::flat_map(&delta, |&(a, b)| {
            let mut v = Vec::new();
            if rule.symmetric {
                v.push(((b, a), (a, b), None));
            }
            if rule.transitive {
                for &c in out.get(&b).map(Vec::as_slice).unwrap_or(&[]) {
                    v.push(((a, c), (a, b), Some((b, c))));
                }
                for &z in inc.get(&a).map(Vec::as_slice).unwrap_or(&[]) {
                    v.push(((z, b), (z, a), Some((a, b))));
                }
            }
            v.retain(|d| !facts.contains(&d.0));
            v
        });
        if derived.is_empty() {
            break;
        }
        rounds += 1;
        // canonical order: conclusion, then the smallest premises by node id
        derived.sort_unstable_by_key(|&(c, p1, p2)| (by_rank(c), by_rank(p1), p2.map(by_rank)));
        derived.dedup_by_key(|d| d.0);

        delta.clear();
        for (c, p1, p2) in derived {
            facts.insert(c);
            out.entry(c.0).or_default().push(c.1);
            inc.entry(c.1).or_default().push(c.0);
            let note = provenance(g, rel, p1, p2);
            g.insert_indexed(
                NodeIdx(c.0),
                rel,
                NodeIdx(c.1),
                false,
                [EvidenceRecord::inferred(note)],
            );
            delta.push(c);
            added += 1;
        }
    }
    (added, rounds)
}

fn provenance(g: &KnowledgeGraph, rel: RelIdx, p1: Pair, p2: Option<Pair>) -> String {
    let rid = &g.registry().relation(rel).id;
    let key = |(s, o): Pair| format!("{}|{rid}|{}", g.id_of(NodeIdx(s)), g.id_of(NodeIdx(o)));
    match p2 {
        Some(p2) => format!("{};{}", key(p1), key(p2)),
        None => key(p1),
    }
}
