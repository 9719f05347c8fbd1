//! Congruence of graph knowledge with curated ground truth, and the audit of
//! semantically contradictory edge pairs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeRecord, KnowledgeGraph, RelationRegistry};
use crate::ingest::tsv;
use crate::par;
use crate::query::{self, QueryOptions};

const POLARITY_TSV: &str = include_str!("../data/polarity.tsv");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Interaction {
    Inhibits,
    Induces,
    NoInteraction,
}

impl Interaction {
    /// INHIBITS and INDUCES swap; NO_INTERACTION is its own flip.
    pub fn flipped(self) -> Interaction {
        match self {
            Interaction::Inhibits => Interaction::Induces,
            Interaction::Induces => Interaction::Inhibits,
            Interaction::NoInteraction => Interaction::NoInteraction,
        }
    }
}

impl FromStr for Interaction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s
            .trim()
            .to_ascii_uppercase()
            .replace([' ', '-'], "_")
            .as_str()
        {
            "INHIBITS" => Ok(Interaction::Inhibits),
            "INDUCES" => Ok(Interaction::Induces),
            "NO_INTERACTION" => Ok(Interaction::NoInteraction),
            other => Err(format!("unknown interaction `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroundTruthAssertion {
    pub np_node: String,
    pub target_node: String,
    pub interaction: Interaction,
    pub evidence_type: String,
}

impl GroundTruthAssertion {
    pub fn new(
        np_node: impl Into<String>,
        target_node: impl Into<String>,
        interaction: Interaction,
        evidence_type: impl Into<String>,
    ) -> Self {
        GroundTruthAssertion {
            np_node: np_node.into(),
            target_node: target_node.into(),
            interaction,
            evidence_type: evidence_type.into(),
        }
    }
}

/// Reads `np_node\ttarget_node\tinteraction\tevidence_type`.
pub fn parse_ground_truth_file(path: &Path) -> Result<Vec<GroundTruthAssertion>> {
    let text = tsv::read_to_string(path)?;
    parse_ground_truth(path, &text)
}

pub fn parse_ground_truth(path: &Path, text: &str) -> Result<Vec<GroundTruthAssertion>> {
    let header = ["np_node", "target_node", "interaction", "evidence_type"];
    let mut out = Vec::new();
    for row in tsv::rows(path, text, &header, 3)? {
        let (Some(np), Some(target)) = (row.opt(0), row.opt(1)) else {
            return Err(Error::parse(
                path,
                row.line,
                "np_node and target_node are required",
            ));
        };
        if np == target {
            return Err(Error::parse(path, row.line, "np_node equals target_node"));
        }
        let interaction = row
            .get(2)
            .parse()
            .map_err(|m: String| Error::parse(path, row.line, m))?;
        out.push(GroundTruthAssertion::new(
            np,
            target,
            interaction,
            row.opt(3).unwrap_or(""),
        ));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Polarity {
    Positive,
    Negative,
    Neutral,
}

/// Relation polarity. Relations not listed are neutral.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarityTable {
    pub positive: BTreeSet<String>,
    pub negative: BTreeSet<String>,
    pub neutral: BTreeSet<String>,
}

impl Default for PolarityTable {
    fn default() -> Self {
        PolarityTable::builtin()
    }
}

impl PolarityTable {
    pub fn builtin() -> Self {
        Self::parse(Path::new("<builtin polarity.tsv>"), POLARITY_TSV)
            .expect("bundled polarity table is valid")
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = tsv::read_to_string(path)?;
        Self::parse(path, &text)
    }

    /// TSV `relation_id\tpolarity`; a relation may appear only once.
    pub fn parse(path: &Path, text: &str) -> Result<Self> {
        let mut t = PolarityTable {
            positive: BTreeSet::new(),
            negative: BTreeSet::new(),
            neutral: BTreeSet::new(),
        };
        let mut seen = BTreeSet::new();
        for row in tsv::rows(path, text, &["relation_id", "polarity"], 2)? {
            let id = row
                .opt(0)
                .ok_or_else(|| Error::parse(path, row.line, "empty relation_id"))?;
            if !seen.insert(id) {
                return Err(Error::parse(path, row.line, format!("`{id}` listed twice")));
            }
            let set = match row.get(1).trim().to_ascii_uppercase().as_str() {
                "POSITIVE" => &mut t.positive,
                "NEGATIVE" => &mut t.negative,
                "NEUTRAL" => &mut t.neutral,
                other => {
                    return Err(Error::parse(
                        path,
                        row.line,
                        format!("unknown polarity `{other}`"),
                    ))
                }
            };
            set.insert(id.to_string());
        }
        Ok(t)
    }

    pub fn polarity(&self, relation_id: &str) -> Polarity {
        if self.negative.contains(relation_id) {
            Polarity::Negative
        } else if self.positive.contains(relation_id) {
            Polarity::Positive
        } else {
            Polarity::Neutral
        }
    }

    /// The same table with every unlisted registry relation added as neutral.
    pub fn covering(&self, registry: &RelationRegistry) -> PolarityTable {
        let mut t = self.clone();
        for r in registry.iter() {
            if self.polarity(&r.id) == Polarity::Neutral {
                t.neutral.insert(r.id.clone());
            }
        }
        t
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Congruent,
    Contradictory,
    Indeterminate,
    Both,
    NoPath,
}

impl Verdict {
    pub const ALL: [Verdict; 5] = [
        Verdict::Congruent,
        Verdict::Contradictory,
        Verdict::Indeterminate,
        Verdict::Both,
        Verdict::NoPath,
    ];
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Congruent => "CONGRUENT",
            Verdict::Contradictory => "CONTRADICTORY",
            Verdict::Indeterminate => "INDETERMINATE",
            Verdict::Both => "BOTH",
            Verdict::NoPath => "NO_PATH",
        })
    }
}

/// What the verdict was read from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Basis {
    DirectEdges,
    /// Final hop of the shortest path.
    ShortestPath,
    Nothing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CongruenceVerdict {
    pub assertion: GroundTruthAssertion,
    pub verdict: Verdict,
    pub basis: Basis,
    /// Node ids of the shortest path when `basis` is `SHORTEST_PATH`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<Vec<String>>,
    pub supporting: Vec<EdgeRecord>,
    pub opposing: Vec<EdgeRecord>,
    /// Edges that were looked at but carry no polarity.
    pub neutral: Vec<EdgeRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Classifies one assertion against the graph.
///
/// Direct edges between the two nodes are used when present; otherwise only
/// the last hop of the shortest path into the target counts.
pub fn classify_assertion(
    g: &KnowledgeGraph,
    a: &GroundTruthAssertion,
    pol: &PolarityTable,
    opts: &QueryOptions,
) -> CongruenceVerdict {
    let mut v = CongruenceVerdict {
        assertion: a.clone(),
        verdict: Verdict::NoPath,
        basis: Basis::Nothing,
        path: None,
        supporting: Vec::new(),
        opposing: Vec::new(),
        neutral: Vec::new(),
        note: None,
    };
    let missing: Vec<&str> = [a.np_node.as_str(), a.target_node.as_str()]
        .into_iter()
        .filter(|id| g.node_idx(id).is_none())
        .collect();
    if !missing.is_empty() {
        v.note = Some(format!("node not in graph: {}", missing.join(", ")));
        return v;
    }

    let direct = query::direct_edges(g, &a.np_node, &a.target_node, opts).expect("nodes checked");
    let edges = if !direct.is_empty() {
        v.basis = Basis::DirectEdges;
        direct
    } else {
        match query::shortest_path(g, &a.np_node, &a.target_node, opts).expect("nodes checked") {
            Some(mut p) => {
                v.basis = Basis::ShortestPath;
                let last = p.steps.pop().map(|s| s.edges).unwrap_or_default();
                v.path = Some(p.nodes);
                last
            }
            None => Vec::new(),
        }
    };

    for e in edges {
        let p = pol.polarity(&e.relation.id);
        let bucket = match (a.interaction, p) {
            (_, Polarity::Neutral) => &mut v.neutral,
            (Interaction::Inhibits, Polarity::Negative) => &mut v.supporting,
            (Interaction::Inhibits, Polarity::Positive) => &mut v.opposing,
            (Interaction::Induces, Polarity::Positive) => &mut v.supporting,
            (Interaction::Induces, Polarity::Negative) => &mut v.opposing,
            (Interaction::NoInteraction, _) => &mut v.opposing,
        };
        bucket.push(e);
    }

    v.verdict = match (
        a.interaction,
        v.supporting.is_empty(),
        v.opposing.is_empty(),
    ) {
        // absence of polar edges supports "no interaction", reachable or not
        (Interaction::NoInteraction, _, true) => Verdict::Congruent,
        (Interaction::NoInteraction, _, false) => Verdict::Contradictory,
        (_, false, false) => Verdict::Both,
        (_, false, true) => Verdict::Congruent,
        (_, true, false) => Verdict::Contradictory,
        (_, true, true) if v.basis == Basis::Nothing => Verdict::NoPath,
        (_, true, true) => Verdict::Indeterminate,
    };
    v
}

/// Classifies every assertion in parallel; output keeps input order.
pub fn classify_all(
    g: &KnowledgeGraph,
    assertions: &[GroundTruthAssertion],
    pol: &PolarityTable,
    opts: &QueryOptions,
) -> Vec<CongruenceVerdict> {
    par::map(assertions, |a| classify_assertion(g, a, pol, opts))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub verdict: Verdict,
    pub count: usize,
    /// Two decimals, rounded half up; absent when the total is zero.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub percent: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationSummary {
    pub total: usize,
    pub rows: Vec<SummaryRow>,
}

impl EvaluationSummary {
    pub fn row(&self, v: Verdict) -> &SummaryRow {
        self.rows
            .iter()
            .find(|r| r.verdict == v)
            .expect("every verdict has a row")
    }
}

/// `100 * count / total` rounded half up to two decimals, computed on integers.
pub fn percent_2dp(count: usize, total: usize) -> Option<f64> {
    if total == 0 {
        return None;
    }
    let (c, t) = (count as u128, total as u128);
    let hundredths = (c * 20_000 + t) / (2 * t);
    Some(hundredths as f64 / 100.0)
}

pub fn summarize_counts(counts: &BTreeMap<Verdict, usize>) -> EvaluationSummary {
    let total = counts.values().sum();
    EvaluationSummary {
        total,
        rows: Verdict::ALL
            .iter()
            .map(|&v| {
                let count = counts.get(&v).copied().unwrap_or(0);
                SummaryRow {
                    verdict: v,
                    count,
                    percent: percent_2dp(count, total),
                }
            })
            .collect(),
    }
}

pub fn summarize_evaluation(verdicts: &[CongruenceVerdict]) -> EvaluationSummary {
    let mut counts = BTreeMap::new();
    for v in verdicts {
        *counts.entry(v.verdict).or_insert(0) += 1;
    }
    summarize_counts(&counts)
}

/// Every (negative, positive) pair of main edges sharing subject and object,
/// sorted. Each unordered pair appears once.
pub fn find_contradictory_edge_pairs(
    g: &KnowledgeGraph,
    pol: &PolarityTable,
) -> Vec<(EdgeRecord, EdgeRecord)> {
    let mut groups: FxHashMap<(u32, u32), (Vec<u32>, Vec<u32>)> = FxHashMap::default();
    for (pos, e) in g.raw_edges().iter().enumerate() {
        let id = &g.registry().relation(e.relation).id;
        let slot = groups.entry((e.subject.0, e.object.0)).or_default();
        match pol.polarity(id) {
            Polarity::Negative => slot.0.push(pos as u32),
            Polarity::Positive => slot.1.push(pos as u32),
            Polarity::Neutral => {}
        }
    }
    let mut out = Vec::new();
    for (neg, posv) in groups.values() {
        for &n in neg {
            for &p in posv {
                out.push((g.edge_ref(n).to_record(), g.edge_ref(p).to_record()));
            }
        }
    }
    par::sort(&mut out);
    out
}
