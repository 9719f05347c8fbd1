//! In-memory directed multigraph.
//!
//! Nodes and relations are interned to dense `u32` indices. There is one
//! logical edge per `(subject, relation, object, negated)`; asserting it again
//! merges the new provenance into the edge's evidence set. Negated edges live
//! in their own store and are invisible to the adjacency indices, so closure
//! and path queries never see them.

mod evidence;
mod node;
mod registry;
mod stats;

use std::sync::Arc;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

pub use evidence::{EvidenceRecord, EvidenceSource};
pub use node::{curie_prefix, Category, NodeRecord};
pub use registry::{RelIdx, RelationId, RelationRegistry};
pub use stats::{percent_change, GraphStats, PercentChange};

pub(crate) use evidence::insert_sorted;
pub(crate) use registry::hex;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeIdx(pub u32);

impl NodeIdx {
    #[inline]
    pub fn ix(self) -> usize {
        self.0 as usize
    }
}

pub(crate) type EdgeKey = (u32, u32, u32);

/// Owned, self-describing form of an edge, used for input and for reports.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub subject: String,
    pub relation: RelationId,
    pub object: String,
    pub evidence: Vec<EvidenceRecord>,
    pub inferred: bool,
    pub negated: bool,
}

impl EdgeRecord {
    pub fn new(
        subject: impl Into<String>,
        relation: RelationId,
        object: impl Into<String>,
        evidence: EvidenceRecord,
    ) -> Self {
        let inferred = evidence.source == EvidenceSource::Inferred;
        EdgeRecord {
            subject: subject.into(),
            relation,
            object: object.into(),
            evidence: vec![evidence],
            inferred,
            negated: false,
        }
    }

    pub fn with_evidence(mut self, evidence: EvidenceRecord) -> Self {
        self.evidence.push(evidence);
        self
    }

    pub fn negate(mut self) -> Self {
        self.negated = true;
        self
    }

    /// `subject|relation|object`, the form used in inferred-edge provenance.
    pub fn key(&self) -> String {
        format!("{}|{}|{}", self.subject, self.relation.id, self.object)
    }
}

/// What [`KnowledgeGraph::add_edge`] did.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AddOutcome {
    Inserted,
    /// The edge existed and gained at least one new evidence record.
    Merged,
    /// The edge existed and already held every supplied record.
    Unchanged,
}

#[derive(Clone, Debug)]
pub(crate) struct Edge {
    pub(crate) subject: NodeIdx,
    pub(crate) relation: RelIdx,
    pub(crate) object: NodeIdx,
    pub(crate) evidence: Vec<EvidenceRecord>,
    pub(crate) inferred: bool,
    /// Smallest year cutoff that admits this edge (`None`: never admitted by a cutoff).
    pub(crate) admission: Option<i32>,
}

impl Edge {
    fn new(subject: NodeIdx, relation: RelIdx, object: NodeIdx) -> Self {
        Edge {
            subject,
            relation,
            object,
            evidence: Vec::new(),
            inferred: true,
            admission: None,
        }
    }

    fn absorb(&mut self, records: impl IntoIterator<Item = EvidenceRecord>) -> bool {
        let mut changed = false;
        for r in records {
            changed |= insert_sorted(&mut self.evidence, r);
        }
        if changed {
            self.inferred = self
                .evidence
                .iter()
                .all(|e| e.source == EvidenceSource::Inferred);
            self.admission = self
                .evidence
                .iter()
                .filter_map(|e| e.admission_year())
                .min();
        }
        changed
    }

    #[inline]
    pub(crate) fn admitted(&self, cutoff: Option<i32>) -> bool {
        match cutoff {
            None => true,
            Some(c) => self.admission.is_some_and(|y| y <= c),
        }
    }
}

#[derive(Clone, Debug, Default)]
struct EdgeStore {
    edges: Vec<Edge>,
    index: FxHashMap<EdgeKey, u32>,
}

impl EdgeStore {
    /// Returns (edge position, outcome).
    fn upsert(
        &mut self,
        key: EdgeKey,
        evidence: impl IntoIterator<Item = EvidenceRecord>,
    ) -> (u32, AddOutcome) {
        if let Some(&pos) = self.index.get(&key) {
            let changed = self.edges[pos as usize].absorb(evidence);
            let outcome = if changed {
                AddOutcome::Merged
            } else {
                AddOutcome::Unchanged
            };
            return (pos, outcome);
        }
        let pos = self.edges.len() as u32;
        let mut edge = Edge::new(NodeIdx(key.0), RelIdx(key.1), NodeIdx(key.2));
        edge.absorb(evidence);
        self.edges.push(edge);
        self.index.insert(key, pos);
        (pos, AddOutcome::Inserted)
    }
}

/// The graph store. Mutated through `&mut self` while it is being built;
/// every query takes `&self`, so a finished graph can be shared across
/// threads (it is `Send + Sync`).
#[derive(Clone, Debug)]
pub struct KnowledgeGraph {
    registry: Arc<RelationRegistry>,
    strict_endpoints: bool,
    nodes: Vec<NodeRecord>,
    node_index: FxHashMap<String, NodeIdx>,
    main: EdgeStore,
    negated: EdgeStore,
    out_adj: Vec<Vec<u32>>,
    in_adj: Vec<Vec<u32>>,
}

impl KnowledgeGraph {
    pub fn new(registry: Arc<RelationRegistry>) -> Self {
        KnowledgeGraph {
            registry,
            strict_endpoints: false,
            nodes: Vec::new(),
            node_index: FxHashMap::default(),
            main: EdgeStore::default(),
            negated: EdgeStore::default(),
            out_adj: Vec::new(),
            in_adj: Vec::new(),
        }
    }

    /// In strict mode, edges naming unknown nodes are rejected instead of
    /// creating `OTHER` placeholder nodes.
    pub fn with_strict_endpoints(mut self, strict: bool) -> Self {
        self.strict_endpoints = strict;
        self
    }

    pub fn strict_endpoints(&self) -> bool {
        self.strict_endpoints
    }

    pub fn registry(&self) -> &Arc<RelationRegistry> {
        &self.registry
    }

    pub fn same_registry(&self, other: &KnowledgeGraph) -> bool {
        Arc::ptr_eq(&self.registry, &other.registry) || *self.registry == *other.registry
    }

    // ---- nodes ---------------------------------------------------------

    pub fn add_node(&mut self, node: NodeRecord) -> Result<NodeIdx> {
        node.validate()?;
        if self.node_index.contains_key(&node.id) {
            return Err(Error::DuplicateNode(node.id));
        }
        Ok(self.push_node(node))
    }

    /// Adds the node unless one with the same id exists. An existing
    /// placeholder (`OTHER`, label = id) is upgraded with the richer record.
    pub fn upsert_node(&mut self, node: NodeRecord) -> Result<NodeIdx> {
        node.validate()?;
        match self.node_index.get(&node.id) {
            Some(&idx) => {
                let existing = &mut self.nodes[idx.ix()];
                if existing.category == Category::Other
                    && existing.label == existing.id
                    && *existing != node
                {
                    *existing = node;
                }
                Ok(idx)
            }
            None => Ok(self.push_node(node)),
        }
    }

    fn push_node(&mut self, node: NodeRecord) -> NodeIdx {
        let idx = NodeIdx(self.nodes.len() as u32);
        self.node_index.insert(node.id.clone(), idx);
        self.nodes.push(node);
        self.out_adj.push(Vec::new());
        self.in_adj.push(Vec::new());
        idx
    }

    fn endpoint(&mut self, id: &str) -> Result<NodeIdx> {
        if let Some(&idx) = self.node_index.get(id) {
            return Ok(idx);
        }
        if self.strict_endpoints {
            return Err(Error::UnknownEndpoint(id.to_string()));
        }
        let node = NodeRecord::placeholder(id);
        node.validate()?;
        Ok(self.push_node(node))
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = &NodeRecord> {
        self.nodes.iter()
    }

    pub fn node(&self, id: &str) -> Option<&NodeRecord> {
        self.node_idx(id).map(|i| &self.nodes[i.ix()])
    }

    pub fn node_idx(&self, id: &str) -> Option<NodeIdx> {
        self.node_index.get(id).copied()
    }

    pub fn require(&self, id: &str) -> Result<NodeIdx> {
        self.node_idx(id)
            .ok_or_else(|| Error::NodeNotFound(id.to_string()))
    }

    pub fn node_at(&self, idx: NodeIdx) -> &NodeRecord {
        &self.nodes[idx.ix()]
    }

    #[inline]
    pub(crate) fn id_of(&self, idx: NodeIdx) -> &str {
        &self.nodes[idx.ix()].id
    }

    // ---- edges ---------------------------------------------------------

    /// Adds an edge, or merges its evidence into the existing edge with the
    /// same `(subject, relation, object, negated)`.
    pub fn add_edge(&mut self, edge: EdgeRecord) -> Result<AddOutcome> {
        let rel = self.registry.resolve(&edge.relation)?;
        if edge.evidence.is_empty() {
            return Err(Error::EmptyEvidence);
        }
        for ev in &edge.evidence {
            ev.validate()?;
        }
        let s = self.endpoint(&edge.subject)?;
        let o = self.endpoint(&edge.object)?;
        Ok(self.insert_indexed(s, rel, o, edge.negated, edge.evidence))
    }

    /// Index-level insert; callers guarantee the evidence is valid and non-empty.
    pub(crate) fn insert_indexed(
        &mut self,
        subject: NodeIdx,
        relation: RelIdx,
        object: NodeIdx,
        negated: bool,
        evidence: impl IntoIterator<Item = EvidenceRecord>,
    ) -> AddOutcome {
        let key = (subject.0, relation.0, object.0);
        if negated {
            return self.negated.upsert(key, evidence).1;
        }
        let (pos, outcome) = self.main.upsert(key, evidence);
        if outcome == AddOutcome::Inserted {
            self.out_adj[subject.ix()].push(pos);
            self.in_adj[object.ix()].push(pos);
        }
        outcome
    }

    pub fn edge_count(&self) -> usize {
        self.main.edges.len()
    }

    pub fn negated_edge_count(&self) -> usize {
        self.negated.edges.len()
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = EdgeRef<'_>> {
        self.main.edges.iter().map(move |e| EdgeRef {
            graph: self,
            edge: e,
            negated: false,
        })
    }

    pub fn negated_edges(&self) -> impl ExactSizeIterator<Item = EdgeRef<'_>> {
        self.negated.edges.iter().map(move |e| EdgeRef {
            graph: self,
            edge: e,
            negated: true,
        })
    }

    pub fn out_edges(&self, node: NodeIdx) -> impl ExactSizeIterator<Item = EdgeRef<'_>> {
        self.out_adj[node.ix()]
            .iter()
            .map(move |&p| self.edge_at(p))
    }

    pub fn in_edges(&self, node: NodeIdx) -> impl ExactSizeIterator<Item = EdgeRef<'_>> {
        self.in_adj[node.ix()].iter().map(move |&p| self.edge_at(p))
    }

    #[inline]
    pub(crate) fn raw_out(&self, node: NodeIdx) -> &[u32] {
        &self.out_adj[node.ix()]
    }

    #[inline]
    pub(crate) fn raw_in(&self, node: NodeIdx) -> &[u32] {
        &self.in_adj[node.ix()]
    }

    #[inline]
    pub(crate) fn raw_edge(&self, pos: u32) -> &Edge {
        &self.main.edges[pos as usize]
    }

    pub(crate) fn raw_edges(&self) -> &[Edge] {
        &self.main.edges
    }

    fn edge_at(&self, pos: u32) -> EdgeRef<'_> {
        EdgeRef {
            graph: self,
            edge: &self.main.edges[pos as usize],
            negated: false,
        }
    }

    pub(crate) fn edge_ref(&self, pos: u32) -> EdgeRef<'_> {
        self.edge_at(pos)
    }

    /// Looks up a main (non-negated) edge by its identity.
    pub fn edge(&self, subject: &str, relation_id: &str, object: &str) -> Option<EdgeRef<'_>> {
        self.find(&self.main, subject, relation_id, object, false)
    }

    pub fn negated_edge(
        &self,
        subject: &str,
        relation_id: &str,
        object: &str,
    ) -> Option<EdgeRef<'_>> {
        self.find(&self.negated, subject, relation_id, object, true)
    }

    fn find<'g>(
        &'g self,
        store: &'g EdgeStore,
        subject: &str,
        relation_id: &str,
        object: &str,
        negated: bool,
    ) -> Option<EdgeRef<'g>> {
        let key = (
            self.node_idx(subject)?.0,
            self.registry.index_of(relation_id)?.0,
            self.node_idx(object)?.0,
        );
        let pos = *store.index.get(&key)?;
        Some(EdgeRef {
            graph: self,
            edge: &store.edges[pos as usize],
            negated,
        })
    }

    /// Every edge (main then negated) as owned records in canonical order:
    /// sorted by subject id, relation id, object id, negated flag.
    pub fn canonical_edges(&self) -> Vec<EdgeRecord> {
        let mut out: Vec<EdgeRecord> = self
            .edges()
            .chain(self.negated_edges())
            .map(|e| e.to_record())
            .collect();
        out.sort_by(|a, b| {
            (&a.subject, &a.relation.id, &a.object, a.negated).cmp(&(
                &b.subject,
                &b.relation.id,
                &b.object,
                b.negated,
            ))
        });
        out
    }

    /// Nodes sorted by id.
    pub fn canonical_nodes(&self) -> Vec<&NodeRecord> {
        let mut v: Vec<&NodeRecord> = self.nodes.iter().collect();
        v.sort_by(|a, b| a.id.cmp(&b.id));
        v
    }

    /// Structural equality independent of insertion order.
    pub fn same_content(&self, other: &KnowledgeGraph) -> bool {
        self.same_registry(other)
            && self.canonical_nodes() == other.canonical_nodes()
            && self.canonical_edges() == other.canonical_edges()
    }

    pub fn compute_stats(&self) -> GraphStats {
        GraphStats::from_counts(self.node_count() as u64, self.edge_count() as u64)
    }

    pub fn inferred_edge_count(&self) -> usize {
        self.main.edges.iter().filter(|e| e.inferred).count()
    }

    /// Copies every node of `self`; used by views that filter edges only.
    pub(crate) fn empty_like(&self) -> KnowledgeGraph {
        let mut g =
            KnowledgeGraph::new(self.registry.clone()).with_strict_endpoints(self.strict_endpoints);
        g.nodes = self.nodes.clone();
        g.node_index = self.node_index.clone();
        g.out_adj = vec![Vec::new(); self.nodes.len()];
        g.in_adj = vec![Vec::new(); self.nodes.len()];
        g
    }
}

/// Borrowed view of a stored edge.
#[derive(Clone, Copy)]
pub struct EdgeRef<'g> {
    graph: &'g KnowledgeGraph,
    edge: &'g Edge,
    negated: bool,
}

impl<'g> EdgeRef<'g> {
    pub fn subject(&self) -> &'g str {
        self.graph.id_of(self.edge.subject)
    }

    pub fn object(&self) -> &'g str {
        self.graph.id_of(self.edge.object)
    }

    pub fn subject_idx(&self) -> NodeIdx {
        self.edge.subject
    }

    pub fn object_idx(&self) -> NodeIdx {
        self.edge.object
    }

    pub fn relation(&self) -> &'g RelationId {
        self.graph.registry.relation(self.edge.relation)
    }

    pub fn relation_idx(&self) -> RelIdx {
        self.edge.relation
    }

    pub fn evidence(&self) -> &'g [EvidenceRecord] {
        &self.edge.evidence
    }

    pub fn is_inferred(&self) -> bool {
        self.edge.inferred
    }

    pub fn is_negated(&self) -> bool {
        self.negated
    }

    pub fn is_self_loop(&self) -> bool {
        self.edge.subject == self.edge.object
    }

    /// True when any evidence record qualifies under `cutoff` (always true without one).
    pub fn admitted(&self, cutoff: Option<i32>) -> bool {
        self.edge.admitted(cutoff)
    }

    pub fn to_record(&self) -> EdgeRecord {
        EdgeRecord {
            subject: self.subject().to_string(),
            relation: self.relation().clone(),
            object: self.object().to_string(),
            evidence: self.edge.evidence.clone(),
            inferred: self.edge.inferred,
            negated: self.negated,
        }
    }
}

impl std::fmt::Debug for EdgeRef<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} -[{}]-> {}{}",
            self.subject(),
            self.relation().label,
            self.object(),
            if self.negated { " (negated)" } else { "" }
        )
    }
}

/// Union of two graphs built against the same registry.
///
/// Nodes are unioned by id (the base record wins unless it is a placeholder)
/// and edges by identity, with evidence merged as in [`KnowledgeGraph::add_edge`].
pub fn merge_graphs(base: &KnowledgeGraph, overlay: &KnowledgeGraph) -> Result<KnowledgeGraph> {
    if !base.same_registry(overlay) {
        return Err(Error::RegistryMismatch);
    }
    let mut out = base.clone();
    let mut remap = Vec::with_capacity(overlay.node_count());
    for node in overlay.nodes() {
        remap.push(out.upsert_node(node.clone())?);
    }
    for (store, negated) in [(&overlay.main, false), (&overlay.negated, true)] {
        for e in &store.edges {
            out.insert_indexed(
                remap[e.subject.ix()],
                e.relation,
                remap[e.object.ix()],
                negated,
                e.evidence.iter().cloned(),
            );
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn registry() -> Arc<RelationRegistry> {
        Arc::new(
            RelationRegistry::new([
                RelationId::new("RO_0002449", "inhibits"),
                RelationId::new("RO_0002213", "positively regulates"),
            ])
            .unwrap(),
        )
    }

    fn inhibits() -> RelationId {
        RelationId::new("RO_0002449", "inhibits")
    }

    fn ev(pmid: &str) -> EvidenceRecord {
        EvidenceRecord::literature(EvidenceSource::Semrep, pmid, Some(2013), "s")
    }

    #[test]
    fn duplicate_assertions_merge_evidence() {
        let mut g = KnowledgeGraph::new(registry());
        let e1 = EdgeRecord::new("A", inhibits(), "B", ev("1"));
        let e2 = EdgeRecord::new("A", inhibits(), "B", ev("2"));
        assert_eq!(g.add_edge(e1.clone()).unwrap(), AddOutcome::Inserted);
        assert_eq!(g.add_edge(e2).unwrap(), AddOutcome::Merged);
        assert_eq!(g.add_edge(e1).unwrap(), AddOutcome::Unchanged);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edge("A", "RO_0002449", "B").unwrap().evidence().len(), 2);
    }

    #[test]
    fn parallel_edges_are_distinct() {
        let mut g = KnowledgeGraph::new(registry());
        g.add_edge(EdgeRecord::new("A", inhibits(), "B", ev("1")))
            .unwrap();
        g.add_edge(EdgeRecord::new(
            "A",
            RelationId::by_id("RO_0002213"),
            "B",
            ev("1"),
        ))
        .unwrap();
        assert_eq!(g.edge_count(), 2);
        let a = g.node_idx("A").unwrap();
        assert_eq!(g.out_edges(a).len(), 2);
    }

    #[test]
    fn unregistered_relation_rejected() {
        let mut g = KnowledgeGraph::new(registry());
        let err = g
            .add_edge(EdgeRecord::new(
                "A",
                RelationId::by_id("FOO_001"),
                "B",
                ev("1"),
            ))
            .unwrap_err();
        assert!(matches!(err, Error::RelationNotRegistered(id) if id == "FOO_001"));
        assert_eq!(g.node_count(), 0);
    }

    #[test]
    fn strict_mode_rejects_unknown_endpoints() {
        let mut g = KnowledgeGraph::new(registry()).with_strict_endpoints(true);
        g.add_node(NodeRecord::new("CHEBI:1", "a", Category::Chemical))
            .unwrap();
        let err = g
            .add_edge(EdgeRecord::new("CHEBI:1", inhibits(), "CHEBI:2", ev("1")))
            .unwrap_err();
        assert!(matches!(err, Error::UnknownEndpoint(id) if id == "CHEBI:2"));
    }

    #[test]
    fn auto_created_endpoints_are_other() {
        let mut g = KnowledgeGraph::new(registry());
        g.add_edge(EdgeRecord::new("CHEBI:1", inhibits(), "PR_9", ev("1")))
            .unwrap();
        let n = g.node("PR_9").unwrap();
        assert_eq!(n.category, Category::Other);
        assert_eq!(n.namespace, "PR");
    }

    #[test]
    fn inferred_flag_follows_evidence() {
        let mut g = KnowledgeGraph::new(registry());
        g.add_edge(EdgeRecord::new(
            "A",
            inhibits(),
            "B",
            EvidenceRecord::inferred("x"),
        ))
        .unwrap();
        assert!(g.edge("A", "RO_0002449", "B").unwrap().is_inferred());
        g.add_edge(EdgeRecord::new("A", inhibits(), "B", ev("1")))
            .unwrap();
        assert!(!g.edge("A", "RO_0002449", "B").unwrap().is_inferred());
        assert_eq!(g.inferred_edge_count(), 0);
    }

    #[test]
    fn negated_edges_stay_out_of_adjacency() {
        let mut g = KnowledgeGraph::new(registry());
        g.add_edge(EdgeRecord::new("A", inhibits(), "B", ev("1")).negate())
            .unwrap();
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.negated_edge_count(), 1);
        assert_eq!(g.out_edges(g.node_idx("A").unwrap()).len(), 0);
        assert!(g.negated_edge("A", "RO_0002449", "B").unwrap().is_negated());
        assert!(g.edge("A", "RO_0002449", "B").is_none());
    }

    #[test]
    fn empty_evidence_and_bad_evidence_rejected() {
        let mut g = KnowledgeGraph::new(registry());
        let mut e = EdgeRecord::new("A", inhibits(), "B", ev("1"));
        e.evidence.clear();
        assert!(matches!(g.add_edge(e), Err(Error::EmptyEvidence)));
        let mut bad = ev("1");
        bad.pmid = None;
        assert!(matches!(
            g.add_edge(EdgeRecord::new("A", inhibits(), "B", bad)),
            Err(Error::InvalidEvidence(_))
        ));
    }

    #[test]
    fn duplicate_node_rejected() {
        let mut g = KnowledgeGraph::new(registry());
        g.add_node(NodeRecord::new("CHEBI:1", "a", Category::Chemical))
            .unwrap();
        assert!(matches!(
            g.add_node(NodeRecord::new("CHEBI:1", "b", Category::Chemical)),
            Err(Error::DuplicateNode(_))
        ));
    }

    #[test]
    fn merge_requires_same_registry() {
        let a = KnowledgeGraph::new(registry());
        let other = Arc::new(RelationRegistry::new([RelationId::new("X_1", "x")]).unwrap());
        let b = KnowledgeGraph::new(other);
        assert!(matches!(merge_graphs(&a, &b), Err(Error::RegistryMismatch)));
        // equal content through a different Arc is fine
        let c = KnowledgeGraph::new(registry());
        assert!(merge_graphs(&a, &c).is_ok());
    }

    #[test]
    fn merge_upgrades_placeholders() {
        let mut a = KnowledgeGraph::new(registry());
        a.add_edge(EdgeRecord::new("CHEBI:1", inhibits(), "PR_2", ev("1")))
            .unwrap();
        let mut b = KnowledgeGraph::new(registry());
        b.add_node(NodeRecord::new("PR_2", "CYP3A4", Category::Protein))
            .unwrap();
        let m = merge_graphs(&a, &b).unwrap();
        assert_eq!(m.node("PR_2").unwrap().label, "CYP3A4");
        assert_eq!(m.node_count(), 2);
    }
}
