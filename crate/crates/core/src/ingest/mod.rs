//! Flat-file ingestion: node and edge TSVs from the curated sources, JSON-lines
//! predications from the literature readers, and the curated maps that turn
//! predications into graph edges.

mod literature;
mod maps;
pub mod tsv;

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize};

pub use literature::{build_literature_graph, IngestReport};
pub use maps::{
    filter_predication, link_entity, normalize_relation, Disposition, EntityMap, EntityMapping,
    FilterConfig, FilterDecision, Link, MapSource, Normalized, RejectReason, RelationMap,
    RelationMapping, ENTITY_MAP_HEADER, RELATION_MAP_HEADER,
};

use crate::error::{Error, Result};
use crate::graph::{
    EdgeRecord, EvidenceRecord, EvidenceSource, KnowledgeGraph, NodeRecord, RelationRegistry,
};
use crate::par;

pub const NODE_HEADER: [&str; 4] = ["id", "label", "namespace", "category"];
pub const EDGE_HEADER: [&str; 9] = [
    "subject",
    "relation_id",
    "relation_label",
    "object",
    "source_name",
    "pmid",
    "year",
    "confidence",
    "sentence",
];

/// Literature reader that produced a predication.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ExtractionSource {
    Semrep,
    Reach,
}

impl ExtractionSource {
    pub fn evidence_source(self) -> EvidenceSource {
        match self {
            ExtractionSource::Semrep => EvidenceSource::Semrep,
            ExtractionSource::Reach => EvidenceSource::Reach,
        }
    }
}

impl fmt::Display for ExtractionSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExtractionSource::Semrep => "SEMREP",
            ExtractionSource::Reach => "REACH",
        })
    }
}

/// A raw extracted triple with sentence-level provenance, before
/// normalisation. One JSON object per line in predication files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Predication {
    pub subject_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subject_id: Option<String>,
    pub relation_raw: String,
    pub object_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object_id: Option<String>,
    pub source: ExtractionSource,
    #[serde(deserialize_with = "string_or_number")]
    pub pmid: String,
    pub year: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
    pub sentence: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subject_semtype: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object_semtype: Option<String>,
}

/// PubMed ids show up both quoted and bare in reader output.
fn string_or_number<'de, D: Deserializer<'de>>(d: D) -> Result<String, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Id {
        S(String),
        N(u64),
    }
    Ok(match Id::deserialize(d)? {
        Id::S(s) => s,
        Id::N(n) => n.to_string(),
    })
}

/// One side of a predication as seen by entity linking.
#[derive(Clone, Copy, Debug)]
pub struct Endpoint<'a> {
    pub text: &'a str,
    pub id: Option<&'a str>,
}

impl Predication {
    pub fn subject(&self) -> Endpoint<'_> {
        Endpoint {
            text: &self.subject_text,
            id: self.subject_id.as_deref(),
        }
    }

    pub fn object(&self) -> Endpoint<'_> {
        Endpoint {
            text: &self.object_text,
            id: self.object_id.as_deref(),
        }
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        for (name, v) in [
            ("relation_raw", &self.relation_raw),
            ("pmid", &self.pmid),
            ("sentence", &self.sentence),
        ] {
            if v.trim().is_empty() {
                return Err(format!("`{name}` must be non-empty"));
            }
        }
        if self.subject_text.trim().is_empty() && self.subject_id.is_none() {
            return Err("subject needs a mention or an id".into());
        }
        if self.object_text.trim().is_empty() && self.object_id.is_none() {
            return Err("object needs a mention or an id".into());
        }
        if let Some(c) = self.confidence {
            if !(0.0..=1.0).contains(&c) {
                return Err(format!("confidence {c} outside [0, 1]"));
            }
        }
        Ok(())
    }
}

pub fn parse_node_file(path: &Path) -> Result<Vec<NodeRecord>> {
    let text = tsv::read_to_string(path)?;
    parse_nodes(path, &text)
}

pub(crate) fn parse_nodes(path: &Path, text: &str) -> Result<Vec<NodeRecord>> {
    Ok(parse_node_rows(path, text)?
        .into_iter()
        .map(|(_, n)| n)
        .collect())
}

/// Nodes with their line numbers; duplicate ids are rejected.
fn parse_node_rows(path: &Path, text: &str) -> Result<Vec<(usize, NodeRecord)>> {
    let rows = tsv::rows(path, text, &NODE_HEADER, NODE_HEADER.len())?;
    let parsed = par::map(&rows, |row| -> Result<NodeRecord> {
        let err = |m: String| Error::parse(path, row.line, m);
        let id = row.opt(0).ok_or_else(|| err("empty node id".into()))?;
        let category = row.get(3).parse().map_err(err)?;
        let mut node = NodeRecord::new(id, tsv::unescape(row.get(1).trim()), category);
        if let Some(ns) = row.opt(2) {
            node.namespace = ns.to_string();
        }
        node.validate().map_err(|e| e.at_line(path, row.line))?;
        Ok(node)
    });
    let mut seen = rustc_hash::FxHashSet::default();
    let mut out = Vec::with_capacity(parsed.len());
    for (row, node) in rows.iter().zip(parsed) {
        let node = node?;
        if !seen.insert(node.id.clone()) {
            return Err(Error::DuplicateNode(node.id).at_line(path, row.line));
        }
        out.push((row.line, node));
    }
    Ok(out)
}

pub fn parse_edge_file(path: &Path, registry: &RelationRegistry) -> Result<Vec<EdgeRecord>> {
    let text = tsv::read_to_string(path)?;
    parse_edges(path, &text, registry)
}

pub(crate) fn parse_edges(
    path: &Path,
    text: &str,
    registry: &RelationRegistry,
) -> Result<Vec<EdgeRecord>> {
    let rows = tsv::rows(path, text, &EDGE_HEADER, 5)?;
    par::map(&rows, |row| parse_edge_row(path, row, registry))
        .into_iter()
        .collect()
}

/// Parses the nine edge-file columns of `row`.
pub(crate) fn parse_edge_row(
    path: &Path,
    row: &tsv::Row<'_>,
    registry: &RelationRegistry,
) -> Result<EdgeRecord> {
    let err = |m: String| Error::parse(path, row.line, m);
    let subject = row.opt(0).ok_or_else(|| err("empty subject".into()))?;
    let relation_id = row.opt(1).ok_or_else(|| err("empty relation_id".into()))?;
    let object = row.opt(3).ok_or_else(|| err("empty object".into()))?;
    let source_name = row.opt(4).ok_or_else(|| err("empty source_name".into()))?;

    let rel = registry.get(relation_id).ok_or_else(|| {
        Error::RelationNotRegistered(relation_id.to_string()).at_line(path, row.line)
    })?;
    if let Some(label) = row.opt(2) {
        if label != rel.label {
            return Err(Error::RelationLabelMismatch {
                id: rel.id.clone(),
                registered: rel.label.clone(),
                given: label.to_string(),
            }
            .at_line(path, row.line));
        }
    }

    let year = row
        .opt(6)
        .map(|y| y.parse::<i32>().map_err(|_| err(format!("bad year `{y}`"))))
        .transpose()?;
    let confidence = row
        .opt(7)
        .map(|c| {
            c.parse::<f64>()
                .map_err(|_| err(format!("bad confidence `{c}`")))
        })
        .transpose()?;
    let evidence = EvidenceRecord {
        source: EvidenceSource::from_source_name(source_name),
        source_name: source_name.to_string(),
        pmid: row.opt(5).map(str::to_string),
        year,
        confidence,
        sentence: row.opt(8).map(tsv::unescape),
        derived_from: None,
    };
    evidence.validate().map_err(|e| e.at_line(path, row.line))?;
    Ok(EdgeRecord::new(subject, rel.clone(), object, evidence))
}

pub fn parse_predication_file(path: &Path) -> Result<Vec<Predication>> {
    let text = tsv::read_to_string(path)?;
    parse_predications(path, &text)
}

pub(crate) fn parse_predications(path: &Path, text: &str) -> Result<Vec<Predication>> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l))
        .collect();
    par::map(&lines, |&(line, l)| -> Result<Predication> {
        let p: Predication =
            serde_json::from_str(l).map_err(|e| Error::parse(path, line, e.to_string()))?;
        p.validate().map_err(|m| Error::parse(path, line, m))?;
        Ok(p)
    })
    .into_iter()
    .collect()
}

/// Builds the curated (ontology/database) graph from node and edge files.
pub fn build_curated_graph(
    registry: Arc<RelationRegistry>,
    node_files: &[&Path],
    edge_files: &[&Path],
    strict_endpoints: bool,
) -> Result<KnowledgeGraph> {
    let mut g = KnowledgeGraph::new(registry.clone()).with_strict_endpoints(strict_endpoints);
    for path in node_files {
        let text = tsv::read_to_string(path)?;
        for (line, node) in parse_node_rows(path, &text)? {
            g.add_node(node).map_err(|e| e.at_line(*path, line))?;
        }
    }
    for path in edge_files {
        let text = tsv::read_to_string(path)?;
        let rows = tsv::rows(path, &text, &EDGE_HEADER, 5)?;
        let edges: Vec<Result<EdgeRecord>> =
            par::map(&rows, |row| parse_edge_row(path, row, &registry));
        for (row, edge) in rows.iter().zip(edges) {
            g.add_edge(edge?).map_err(|e| e.at_line(*path, row.line))?;
        }
    }
    Ok(g)
}
