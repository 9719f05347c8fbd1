//! Read-only queries over a finished graph.
//!
//! Negated edges are never traversed. With a year cutoff only edges holding
//! at least one qualifying evidence record are visible.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeRecord, KnowledgeGraph, NodeIdx};
use crate::ingest::tsv;
use crate::par;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryOptions {
    pub directed: bool,
    pub year_cutoff: Option<i32>,
}

impl Default for QueryOptions {
    fn default() -> Self {
        QueryOptions::directed()
    }
}

impl QueryOptions {
    pub fn directed() -> Self {
        QueryOptions {
            directed: true,
            year_cutoff: None,
        }
    }

    pub fn undirected() -> Self {
        QueryOptions {
            directed: false,
            year_cutoff: None,
        }
    }

    pub fn with_cutoff(mut self, year: Option<i32>) -> Self {
        self.year_cutoff = year;
        self
    }
}

fn sorted(mut v: Vec<EdgeRecord>) -> Vec<EdgeRecord> {
    v.sort();
    v.dedup();
    v
}

/// Visible edges between `a` and `b` as they are stored, `a → b` first.
fn edges_between(
    g: &KnowledgeGraph,
    a: NodeIdx,
    b: NodeIdx,
    opts: &QueryOptions,
) -> Vec<EdgeRecord> {
    let mut out: Vec<EdgeRecord> = g
        .raw_out(a)
        .iter()
        .map(|&p| g.edge_ref(p))
        .filter(|e| e.object_idx() == b && e.admitted(opts.year_cutoff))
        .map(|e| e.to_record())
        .collect();
    if !opts.directed {
        out.extend(
            g.raw_out(b)
                .iter()
                .map(|&p| g.edge_ref(p))
                .filter(|e| e.object_idx() == a && e.admitted(opts.year_cutoff))
                .map(|e| e.to_record()),
        );
    }
    sorted(out)
}

/// All visible edges `a → b` (and `b → a` when undirected). Self-loops only
/// appear when `a == b`.
pub fn direct_edges(
    g: &KnowledgeGraph,
    a: &str,
    b: &str,
    opts: &QueryOptions,
) -> Result<Vec<EdgeRecord>> {
    let (ia, ib) = (g.require(a)?, g.require(b)?);
    Ok(edges_between(g, ia, ib, opts))
}

/// One hop of a path with every parallel visible edge between its endpoints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathStep {
    pub from: String,
    pub to: String,
    pub edges: Vec<EdgeRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathResult {
    pub nodes: Vec<String>,
    pub steps: Vec<PathStep>,
    pub length: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Dir {
    Forward,
    Backward,
}

fn for_each_neighbor(
    g: &KnowledgeGraph,
    u: u32,
    dir: Dir,
    opts: &QueryOptions,
    mut f: impl FnMut(u32),
) {
    let node = NodeIdx(u);
    let cutoff = opts.year_cutoff;
    if opts.directed {
        let adj = if dir == Dir::Forward {
            g.raw_out(node)
        } else {
            g.raw_in(node)
        };
        for &p in adj {
            let e = g.raw_edge(p);
            if e.admitted(cutoff) {
                f(if dir == Dir::Forward {
                    e.object.0
                } else {
                    e.subject.0
                });
            }
        }
    } else {
        for &p in g.raw_out(node) {
            let e = g.raw_edge(p);
            if e.admitted(cutoff) {
                f(e.object.0);
            }
        }
        for &p in g.raw_in(node) {
            let e = g.raw_edge(p);
            if e.admitted(cutoff) {
                f(e.subject.0);
            }
        }
    }
}

/// Minimum-hop path from `src` to `dst`, `None` when unreachable.
///
/// Among equal-length paths the one whose node-id sequence is
/// lexicographically smallest is returned.
pub fn shortest_path(
    g: &KnowledgeGraph,
    src: &str,
    dst: &str,
    opts: &QueryOptions,
) -> Result<Option<PathResult>> {
    let (s, t) = (g.require(src)?, g.require(dst)?);
    Ok(shortest_path_idx(g, s, t, opts).map(|nodes| to_result(g, &nodes, opts)))
}

/// Runs [`shortest_path`] for many pairs in parallel; results keep input order.
pub fn shortest_paths(
    g: &KnowledgeGraph,
    pairs: &[(String, String)],
    opts: &QueryOptions,
) -> Vec<Result<Option<PathResult>>> {
    par::map(pairs, |(a, b)| shortest_path(g, a, b, opts))
}

fn to_result(g: &KnowledgeGraph, nodes: &[u32], opts: &QueryOptions) -> PathResult {
    let steps = nodes
        .windows(2)
        .map(|w| PathStep {
            from: g.id_of(NodeIdx(w[0])).to_string(),
            to: g.id_of(NodeIdx(w[1])).to_string(),
            edges: edges_between(g, NodeIdx(w[0]), NodeIdx(w[1]), opts),
        })
        .collect();
    PathResult {
        nodes: nodes
            .iter()
            .map(|&n| g.id_of(NodeIdx(n)).to_string())
            .collect(),
        steps,
        length: nodes.len() - 1,
    }
}

struct Side {
    dist: FxHashMap<u32, u32>,
    layers: Vec<Vec<u32>>,
}

impl Side {
    fn new(root: u32) -> Self {
        let mut dist = FxHashMap::default();
        dist.insert(root, 0);
        Side {
            dist,
            layers: vec![vec![root]],
        }
    }

    fn depth(&self) -> u32 {
        (self.layers.len() - 1) as u32
    }

    fn frontier(&self) -> &[u32] {
        self.layers.last().expect("at least the root layer")
    }

    /// Expands one full layer; returns whether it touched `other`.
    fn expand(&mut self, g: &KnowledgeGraph, dir: Dir, opts: &QueryOptions, other: &Side) -> bool {
        let next_depth = self.depth() + 1;
        let mut next = Vec::new();
        let mut met = false;
        let dist = &mut self.dist;
        for &u in self.layers.last().expect("at least the root layer") {
            for_each_neighbor(g, u, dir, opts, |w| {
                if let std::collections::hash_map::Entry::Vacant(slot) = dist.entry(w) {
                    slot.insert(next_depth);
                    next.push(w);
                    met |= other.dist.contains_key(&w);
                }
            });
        }
        self.layers.push(next);
        met
    }
}

pub(crate) fn shortest_path_idx(
    g: &KnowledgeGraph,
    s: NodeIdx,
    t: NodeIdx,
    opts: &QueryOptions,
) -> Option<Vec<u32>> {
    if s == t {
        return Some(vec![s.0]);
    }
    let mut fwd = Side::new(s.0);
    let mut bwd = Side::new(t.0);
    loop {
        if fwd.frontier().is_empty() || bwd.frontier().is_empty() {
            return None;
        }
        let met = if fwd.frontier().len() <= bwd.frontier().len() {
            fwd.expand(g, Dir::Forward, opts, &bwd)
        } else {
            bwd.expand(g, Dir::Backward, opts, &fwd)
        };
        if met {
            break;
        }
    }
    // With whole layers expanded on both sides the first meeting fixes the
    // distance: d = a + b.
    let (a, b) = (fwd.depth(), bwd.depth());
    let d = a + b;

    // good[j]: nodes at forward distance j that lie on some shortest path.
    let mut good: Vec<FxHashSet<u32>> = vec![FxHashSet::default(); a as usize + 1];
    good[a as usize] = fwd.layers[a as usize]
        .iter()
        .copied()
        .filter(|v| bwd.dist.get(v) == Some(&b))
        .collect();
    for j in (1..=a as usize).rev() {
        let mut prev = FxHashSet::default();
        for &w in &good[j] {
            for_each_neighbor(g, w, Dir::Backward, opts, |u| {
                if fwd.dist.get(&u) == Some(&(j as u32 - 1)) {
                    prev.insert(u);
                }
            });
        }
        good[j - 1] = prev;
    }

    let mut path = vec![s.0];
    let mut u = s.0;
    for i in 0..d {
        let want = i + 1;
        let mut best: Option<u32> = None;
        for_each_neighbor(g, u, Dir::Forward, opts, |w| {
            let on_path = if want <= a {
                good[want as usize].contains(&w)
            } else {
                bwd.dist.get(&w) == Some(&(d - want))
            };
            if on_path && best.is_none_or(|cur| g.id_of(NodeIdx(w)) < g.id_of(NodeIdx(cur))) {
                best = Some(w);
            }
        });
        u = best.expect("a shortest path continues through every good node");
        path.push(u);
    }
    debug_assert_eq!(u, t.0);
    Some(path)
}

// ---- meta-paths --------------------------------------------------------

/// Relations allowed on meta-path slots unless configured otherwise.
pub const DEFAULT_WHITELIST: [&str; 11] = [
    "RO_0002434",            // interacts with
    "RO_0002436",            // molecularly interacts with
    "RO_0002610",            // correlated with
    "RO_0002448",            // directly regulates activity of
    "RO_0002213",            // positively regulates
    "RO_0002449",            // inhibits
    "RO_0002596",            // capable of regulating
    "RO_0002598",            // capable of positively regulating
    "LOCAL:is_substrate_of", // is substrate of
    "RO_0002313",            // transports
    "RO_0011002",            // regulates activity of
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TemplateShape {
    NpToDrugDirect,
    DrugToNpDirect,
    NpViaTargetToDrug,
    ConvergentTarget,
}

impl TemplateShape {
    pub const ALL: [TemplateShape; 4] = [
        TemplateShape::NpToDrugDirect,
        TemplateShape::DrugToNpDirect,
        TemplateShape::NpViaTargetToDrug,
        TemplateShape::ConvergentTarget,
    ];
}

/// A template with its two relation slots. Direct shapes only use slot A.
/// Slot A is the edge leaving the natural product; slot B is the edge that
/// reaches the drug (shape 3) or leaves it (shape 4).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetaPathTemplate {
    pub shape: TemplateShape,
    pub relation_a: BTreeSet<String>,
    pub relation_b: BTreeSet<String>,
}

impl MetaPathTemplate {
    pub fn new(shape: TemplateShape, whitelist: &BTreeSet<String>) -> Self {
        MetaPathTemplate {
            shape,
            relation_a: whitelist.clone(),
            relation_b: whitelist.clone(),
        }
    }

    pub fn default_whitelist() -> BTreeSet<String> {
        DEFAULT_WHITELIST.iter().map(|s| s.to_string()).collect()
    }

    /// All four shapes sharing the default whitelist.
    pub fn defaults() -> Vec<MetaPathTemplate> {
        let w = Self::default_whitelist();
        TemplateShape::ALL
            .iter()
            .map(|&s| MetaPathTemplate::new(s, &w))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TargetKind {
    Enzyme,
    Transporter,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetSet {
    pub enzymes: BTreeSet<String>,
    pub transporters: BTreeSet<String>,
}

impl TargetSet {
    /// TSV with header `node_id\tkind`, kind `ENZYME` or `TRANSPORTER`.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = tsv::read_to_string(path)?;
        Self::parse(path, &text)
    }

    pub fn parse(path: &Path, text: &str) -> Result<Self> {
        let mut set = TargetSet::default();
        for row in tsv::rows(path, text, &["node_id", "kind"], 2)? {
            let id = row
                .opt(0)
                .ok_or_else(|| Error::parse(path, row.line, "empty node_id"))?
                .to_string();
            match row.get(1).trim().to_ascii_uppercase().as_str() {
                "ENZYME" => set.enzymes.insert(id),
                "TRANSPORTER" => set.transporters.insert(id),
                other => {
                    return Err(Error::parse(
                        path,
                        row.line,
                        format!("unknown kind `{other}`"),
                    ))
                }
            };
        }
        Ok(set)
    }

    pub fn kinds(&self, id: &str) -> impl Iterator<Item = TargetKind> {
        let e = self.enzymes.contains(id).then_some(TargetKind::Enzyme);
        let t = self
            .transporters
            .contains(id)
            .then_some(TargetKind::Transporter);
        e.into_iter().chain(t)
    }

    fn ids(&self) -> BTreeSet<&str> {
        self.enzymes
            .iter()
            .chain(&self.transporters)
            .map(String::as_str)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetaPathHit {
    pub shape: TemplateShape,
    /// `None` for the two direct shapes.
    pub target: Option<String>,
    pub target_label: Option<String>,
    pub kind: Option<TargetKind>,
    pub edges: Vec<EdgeRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetaPathResult {
    pub np_nodes: Vec<String>,
    pub drug: String,
    pub enzymes: BTreeSet<String>,
    pub transporters: BTreeSet<String>,
    pub hits: Vec<MetaPathHit>,
}

impl MetaPathResult {
    pub fn targets(&self, kind: TargetKind) -> &BTreeSet<String> {
        match kind {
            TargetKind::Enzyme => &self.enzymes,
            TargetKind::Transporter => &self.transporters,
        }
    }
}

/// Visible edges from `a` to `b` (either way when undirected) whose relation
/// is in `allowed`.
fn slot_edges(
    g: &KnowledgeGraph,
    a: NodeIdx,
    b: NodeIdx,
    allowed: &BTreeSet<String>,
    opts: &QueryOptions,
) -> Vec<EdgeRecord> {
    let mut v = edges_between(g, a, b, opts);
    v.retain(|e| allowed.contains(&e.relation.id));
    v
}

/// Evaluates each template for the natural-product nodes `np_nodes` (for
/// example a plant and its constituents) against `drug`.
///
/// The convergent shape is always matched on edge direction.
pub fn find_metapaths(
    g: &KnowledgeGraph,
    np_nodes: &[&str],
    drug: &str,
    templates: &[MetaPathTemplate],
    targets: &TargetSet,
    opts: &QueryOptions,
) -> Result<MetaPathResult> {
    let mut nps = Vec::with_capacity(np_nodes.len());
    for id in np_nodes {
        nps.push(g.require(id)?);
    }
    let d = g.require(drug)?;
    let directed = QueryOptions {
        directed: true,
        ..*opts
    };
    // target nodes absent from the graph simply cannot be hit
    let target_nodes: Vec<NodeIdx> = targets
        .ids()
        .into_iter()
        .filter_map(|t| g.node_idx(t))
        .collect();

    let mut grouped: BTreeMap<
        (TemplateShape, Option<TargetKind>, Option<String>),
        Vec<EdgeRecord>,
    > = BTreeMap::new();
    for tpl in templates {
        match tpl.shape {
            TemplateShape::NpToDrugDirect | TemplateShape::DrugToNpDirect => {
                let mut edges = Vec::new();
                for &np in &nps {
                    let (from, to) = if tpl.shape == TemplateShape::NpToDrugDirect {
                        (np, d)
                    } else {
                        (d, np)
                    };
                    edges.extend(slot_edges(g, from, to, &tpl.relation_a, opts));
                }
                if !edges.is_empty() {
                    grouped
                        .entry((tpl.shape, None, None))
                        .or_default()
                        .extend(edges);
                }
            }
            TemplateShape::NpViaTargetToDrug | TemplateShape::ConvergentTarget => {
                let o = if tpl.shape == TemplateShape::ConvergentTarget {
                    &directed
                } else {
                    opts
                };
                for &t in &target_nodes {
                    if nps.contains(&t) || t == d {
                        continue;
                    }
                    let first: Vec<EdgeRecord> = nps
                        .iter()
                        .flat_map(|&np| slot_edges(g, np, t, &tpl.relation_a, o))
                        .collect();
                    if first.is_empty() {
                        continue;
                    }
                    let second = if tpl.shape == TemplateShape::ConvergentTarget {
                        slot_edges(g, d, t, &tpl.relation_b, o)
                    } else {
                        slot_edges(g, t, d, &tpl.relation_b, o)
                    };
                    if second.is_empty() {
                        continue;
                    }
                    let id = g.id_of(t).to_string();
                    for kind in targets.kinds(&id) {
                        grouped
                            .entry((tpl.shape, Some(kind), Some(id.clone())))
                            .or_default()
                            .extend(first.iter().chain(&second).cloned());
                    }
                }
            }
        }
    }

    let mut result = MetaPathResult {
        np_nodes: np_nodes.iter().map(|s| s.to_string()).collect(),
        drug: drug.to_string(),
        enzymes: BTreeSet::new(),
        transporters: BTreeSet::new(),
        hits: Vec::new(),
    };
    for ((shape, kind, target), edges) in grouped {
        if let (Some(kind), Some(t)) = (kind, &target) {
            match kind {
                TargetKind::Enzyme => result.enzymes.insert(t.clone()),
                TargetKind::Transporter => result.transporters.insert(t.clone()),
            };
        }
        result.hits.push(MetaPathHit {
            shape,
            target_label: target
                .as_ref()
                .and_then(|t| g.node(t))
                .map(|n| n.label.clone()),
            target,
            kind,
            edges: sorted(edges),
        });
    }
    Ok(result)
}

// ---- time slicing --------------------------------------------------------

/// Copy of `g` holding only the edges admitted at `year_cutoff`. Every node
/// is kept; admitted edges keep their full evidence.
pub fn time_slice(g: &KnowledgeGraph, year_cutoff: i32) -> KnowledgeGraph {
    let mut out = g.empty_like();
    for e in g.edges().chain(g.negated_edges()) {
        if e.admitted(Some(year_cutoff)) {
            out.insert_indexed(
                e.subject_idx(),
                e.relation_idx(),
                e.object_idx(),
                e.is_negated(),
                e.evidence().iter().cloned(),
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{EvidenceRecord, EvidenceSource, RelationId};
    use crate::ingest::RelationMap;

    fn lit(year: i32) -> EvidenceRecord {
        EvidenceRecord::literature(EvidenceSource::Semrep, "1", Some(year), "s")
    }

    fn graph(edges: &[(&str, &str, &str)]) -> KnowledgeGraph {
        let mut g = KnowledgeGraph::new(RelationMap::builtin().registry());
        for (s, r, o) in edges {
            g.add_edge(EdgeRecord::new(*s, RelationId::by_id(*r), *o, lit(2010)))
                .unwrap();
        }
        g
    }

    const INH: &str = "RO_0002449";

    #[test]
    fn direct_edges_respect_direction() {
        let g = graph(&[("A", INH, "B")]);
        let d = QueryOptions::directed();
        assert_eq!(direct_edges(&g, "A", "B", &d).unwrap().len(), 1);
        assert!(direct_edges(&g, "B", "A", &d).unwrap().is_empty());
        assert_eq!(
            direct_edges(&g, "B", "A", &QueryOptions::undirected())
                .unwrap()
                .len(),
            1
        );
        assert!(matches!(
            direct_edges(&g, "A", "Z", &d),
            Err(Error::NodeNotFound(id)) if id == "Z"
        ));
    }

    #[test]
    fn self_loops_only_for_same_endpoints() {
        let g = graph(&[("A", INH, "A"), ("A", INH, "B")]);
        let u = QueryOptions::undirected();
        assert_eq!(direct_edges(&g, "A", "A", &u).unwrap().len(), 1);
        assert_eq!(direct_edges(&g, "A", "B", &u).unwrap().len(), 1);
    }

    #[test]
    fn identity_path() {
        let g = graph(&[("A", INH, "B")]);
        let p = shortest_path(&g, "A", "A", &QueryOptions::directed())
            .unwrap()
            .unwrap();
        assert_eq!(p.length, 0);
        assert_eq!(p.nodes, vec!["A"]);
        assert!(p.steps.is_empty());
    }

    #[test]
    fn forced_two_hop_path() {
        let g = graph(&[("A", INH, "B"), ("B", INH, "C")]);
        let p = shortest_path(&g, "A", "C", &QueryOptions::directed())
            .unwrap()
            .unwrap();
        assert_eq!(p.length, 2);
        assert_eq!(p.nodes, vec!["A", "B", "C"]);
        assert!(shortest_path(&g, "C", "A", &QueryOptions::directed())
            .unwrap()
            .is_none());
        let back = shortest_path(&g, "C", "A", &QueryOptions::undirected())
            .unwrap()
            .unwrap();
        assert_eq!(back.nodes, vec!["C", "B", "A"]);
        assert_eq!(back.steps[0].edges[0].subject, "B");
    }

    #[test]
    fn lexicographic_tie_break() {
        let g = graph(&[
            ("S", INH, "M2"),
            ("S", INH, "M1"),
            ("M2", INH, "T"),
            ("M1", INH, "X"),
            ("X", INH, "T"),
            ("S", INH, "Y"),
            ("Y", INH, "T"),
        ]);
        let p = shortest_path(&g, "S", "T", &QueryOptions::directed())
            .unwrap()
            .unwrap();
        assert_eq!(p.nodes, vec!["S", "M2", "T"]);
    }

    #[test]
    fn parallel_edges_attached_to_step() {
        let g = graph(&[("A", INH, "B"), ("A", "RO_0002213", "B")]);
        let p = shortest_path(&g, "A", "B", &QueryOptions::directed())
            .unwrap()
            .unwrap();
        assert_eq!(p.steps[0].edges.len(), 2);
    }

    #[test]
    fn cutoff_hides_late_edges() {
        let mut g = graph(&[("A", INH, "B")]);
        g.add_edge(EdgeRecord::new("B", RelationId::by_id(INH), "C", lit(2020)))
            .unwrap();
        let o = QueryOptions::directed().with_cutoff(Some(2015));
        assert!(shortest_path(&g, "A", "C", &o).unwrap().is_none());
        assert!(shortest_path(&g, "A", "B", &o).unwrap().is_some());
    }

    #[test]
    fn negated_edges_never_traversed() {
        let mut g = graph(&[]);
        g.add_edge(EdgeRecord::new("A", RelationId::by_id(INH), "B", lit(2010)).negate())
            .unwrap();
        let o = QueryOptions::undirected();
        assert!(shortest_path(&g, "A", "B", &o).unwrap().is_none());
        assert!(direct_edges(&g, "A", "B", &o).unwrap().is_empty());
    }

    #[test]
    fn time_slice_any_evidence_rule() {
        let mut g = graph(&[]);
        let e =
            EdgeRecord::new("A", RelationId::by_id(INH), "B", lit(2013)).with_evidence(lit(2017));
        g.add_edge(e).unwrap();
        g.add_edge(EdgeRecord::new(
            "A",
            RelationId::by_id("RO_0002434"),
            "C",
            EvidenceRecord::database("CTD"),
        ))
        .unwrap();
        g.add_edge(EdgeRecord::new("C", RelationId::by_id(INH), "B", lit(2019)))
            .unwrap();
        let s = time_slice(&g, 2014);
        assert_eq!(s.node_count(), g.node_count());
        assert_eq!(s.edge_count(), 2);
        assert_eq!(s.edge("A", INH, "B").unwrap().evidence().len(), 2);
        assert!(time_slice(&g, 3000).same_content(&g));
    }

    #[test]
    fn empty_graph_has_no_hits() {
        let mut g = graph(&[]);
        for id in ["NP", "D"] {
            g.add_node(crate::NodeRecord::new(id, id, crate::Category::Chemical))
                .unwrap();
        }
        let r = find_metapaths(
            &g,
            &["NP"],
            "D",
            &MetaPathTemplate::defaults(),
            &TargetSet::default(),
            &QueryOptions::directed(),
        )
        .unwrap();
        assert!(r.hits.is_empty());
    }

    #[test]
    fn templates_match_shapes() {
        let g = graph(&[
            ("NP", INH, "E1"),
            ("E1", "LOCAL:is_substrate_of", "D"),
            ("NP", INH, "T1"),
            ("D", "LOCAL:is_substrate_of", "T1"),
            ("NP", "RO_0011009", "E2"),
            ("D", "LOCAL:is_substrate_of", "E2"),
            ("NP", "RO_0002434", "D"),
        ]);
        let targets = TargetSet::parse(
            Path::new("t"),
            "node_id\tkind\nE1\tENZYME\nE2\tENZYME\nT1\tTRANSPORTER\n",
        )
        .unwrap();
        let r = find_metapaths(
            &g,
            &["NP"],
            "D",
            &MetaPathTemplate::defaults(),
            &targets,
            &QueryOptions::directed(),
        )
        .unwrap();
        // E2 is reached through a relation outside the whitelist
        assert_eq!(r.enzymes, BTreeSet::from(["E1".to_string()]));
        assert_eq!(r.transporters, BTreeSet::from(["T1".to_string()]));
        let shapes: Vec<_> = r.hits.iter().map(|h| h.shape).collect();
        assert_eq!(
            shapes,
            vec![
                TemplateShape::NpToDrugDirect,
                TemplateShape::NpViaTargetToDrug,
                TemplateShape::ConvergentTarget
            ]
        );
        for h in &r.hits {
            for e in &h.edges {
                assert!(DEFAULT_WHITELIST.contains(&e.relation.id.as_str()));
                assert!(g.edge(&e.subject, &e.relation.id, &e.object).is_some());
            }
        }
    }
}
