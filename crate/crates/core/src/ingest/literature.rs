use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::maps::{
    filter_predication, link_entity, EntityMap, FilterConfig, FilterDecision, Link, Normalized,
    RelationMap,
};
use super::Predication;
use crate::graph::{
    curie_prefix, AddOutcome, Category, EvidenceRecord, KnowledgeGraph, NodeIdx, NodeRecord,
};
use crate::par;

/// Counts produced by [`build_literature_graph`].
///
/// `accepted + rejected_by_filter + dropped_unmapped == input`. Predications
/// whose relation normalises to `Excluded` count as rejected. `negated`
/// counts accepted predications routed to the negated store, and
/// `deduplicated` those that landed on an already existing edge.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub input: usize,
    pub accepted: usize,
    pub rejected_by_filter: usize,
    pub dropped_unmapped: usize,
    pub negated: usize,
    pub deduplicated: usize,
    /// Breakdown of `rejected_by_filter` by reason.
    pub rejected_reasons: BTreeMap<String, usize>,
}

impl IngestReport {
    pub fn is_conserved(&self) -> bool {
        self.accepted + self.rejected_by_filter + self.dropped_unmapped == self.input
    }
}

#[allow(clippy::large_enum_variant)]
enum Outcome {
    Rejected(String),
    Unmapped,
    Edge {
        subject: (String, String, u8),
        object: (String, String, u8),
        relation: crate::graph::RelationId,
        negated: bool,
        evidence: EvidenceRecord,
    },
}

/// Resolved endpoint: (curie, label candidate, label priority; lower wins).
fn resolve(endpoint: super::Endpoint<'_>, entities: &EntityMap) -> Option<(String, String, u8)> {
    match link_entity(endpoint, entities) {
        Link::Unmapped => None,
        Link::Linked(id) => {
            // a curated label beats whatever mention text the reader saw
            Some(match entities.label_of(&id) {
                Some(label) => (id.clone(), label.to_string(), 0),
                None if !endpoint.text.trim().is_empty() => {
                    (id, endpoint.text.trim().to_string(), 1)
                }
                None => (id.clone(), id, 2),
            })
        }
    }
}

fn classify(
    p: &Predication,
    relations: &RelationMap,
    entities: &EntityMap,
    filter: &FilterConfig,
) -> Outcome {
    if let FilterDecision::Reject(reason) = filter_predication(p, filter) {
        return Outcome::Rejected(reason.to_string());
    }
    let (relation, negated) = match relations.normalize(&p.relation_raw, p.source) {
        Normalized::Keep(r) => (r, false),
        Normalized::Negated(r) => (r, true),
        Normalized::Excluded => return Outcome::Rejected("excluded-relation".into()),
    };
    let (Some(subject), Some(object)) = (
        resolve(p.subject(), entities),
        resolve(p.object(), entities),
    ) else {
        return Outcome::Unmapped;
    };
    let mut evidence = EvidenceRecord::literature(
        p.source.evidence_source(),
        p.pmid.trim(),
        Some(p.year),
        p.sentence.as_str(),
    );
    evidence.confidence = p.confidence;
    Outcome::Edge {
        subject,
        object,
        relation,
        negated,
        evidence,
    }
}

/// Runs filter → relation normalisation → entity linking over every
/// predication and assembles the literature graph.
///
/// The result does not depend on input order: node labels are chosen by a
/// fixed priority (curated label, then smallest mention text) and evidence
/// sets are kept sorted.
pub fn build_literature_graph(
    predications: &[Predication],
    relations: &RelationMap,
    entities: &EntityMap,
    filter: &FilterConfig,
) -> (KnowledgeGraph, IngestReport) {
    let outcomes = par::map(predications, |p| classify(p, relations, entities, filter));

    let mut report = IngestReport {
        input: predications.len(),
        ..Default::default()
    };
    let mut labels: BTreeMap<String, (u8, String)> = BTreeMap::new();
    let mut note_label = |(id, label, prio): &(String, String, u8)| {
        let cand = (*prio, label.clone());
        labels
            .entry(id.clone())
            .and_modify(|cur| {
                if cand < *cur {
                    *cur = cand.clone();
                }
            })
            .or_insert(cand);
    };
    for o in &outcomes {
        match o {
            Outcome::Rejected(reason) => {
                report.rejected_by_filter += 1;
                *report.rejected_reasons.entry(reason.clone()).or_default() += 1;
            }
            Outcome::Unmapped => report.dropped_unmapped += 1,
            Outcome::Edge {
                subject, object, ..
            } => {
                note_label(subject);
                note_label(object);
            }
        }
    }

    let mut graph = KnowledgeGraph::new(relations.registry());
    let mut index: BTreeMap<&str, NodeIdx> = BTreeMap::new();
    for (id, (_, label)) in &labels {
        let category = curie_prefix(id)
            .map(Category::from_namespace)
            .unwrap_or(Category::Other);
        let node = NodeRecord::new(id.as_str(), label.as_str(), category);
        let idx = graph
            .upsert_node(node)
            .expect("linked ids are non-empty CURIEs");
        index.insert(id, idx);
    }

    let registry = relations.registry();
    for o in outcomes {
        let Outcome::Edge {
            subject,
            object,
            relation,
            negated,
            evidence,
        } = o
        else {
            continue;
        };
        let rel = registry
            .resolve(&relation)
            .expect("relation map entries are registered");
        let (s, t) = (index[subject.0.as_str()], index[object.0.as_str()]);
        report.accepted += 1;
        if negated {
            report.negated += 1;
        }
        let outcome = graph.insert_indexed(s, rel, t, negated, [evidence]);
        if outcome != AddOutcome::Inserted {
            report.deduplicated += 1;
        }
    }
    (graph, report)
}
