//! On-disk graph snapshot: a directory holding `nodes.tsv`, `edges.tsv` and
//! `manifest.json`.
//!
//! `edges.tsv` uses the nine edge-file columns followed by `inferred`,
//! `negated` and `derived_from`, with one row per evidence record. Rows and
//! nodes are written in canonical order, so equal graphs give byte-identical
//! files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{hex, GraphStats, KnowledgeGraph, RelationId, RelationRegistry};
use crate::ingest::{parse_edge_row, parse_nodes, tsv, EDGE_HEADER, NODE_HEADER};

pub const FORMAT_VERSION: u32 = 1;
pub const NODES_FILE: &str = "nodes.tsv";
pub const EDGES_FILE: &str = "edges.tsv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const EXTRA_EDGE_COLUMNS: [&str; 3] = ["inferred", "negated", "derived_from"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub registry_digest: String,
    /// Hash of whatever configuration produced the graph, if the caller has one.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub config_hash: Option<String>,
    pub node_count: usize,
    pub edge_count: usize,
    pub negated_edge_count: usize,
    pub inferred_edge_count: usize,
    pub stats: GraphStats,
    pub registry: Vec<RelationId>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

pub fn nodes_tsv(g: &KnowledgeGraph) -> String {
    let mut out = NODE_HEADER.join("\t");
    out.push('\n');
    for n in g.canonical_nodes() {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}",
            n.id,
            tsv::escape(&n.label),
            n.namespace,
            n.category
        );
    }
    out
}

pub fn edges_tsv(g: &KnowledgeGraph) -> String {
    let mut out = EDGE_HEADER.join("\t");
    for c in EXTRA_EDGE_COLUMNS {
        out.push('\t');
        out.push_str(c);
    }
    out.push('\n');
    for e in g.canonical_edges() {
        for ev in &e.evidence {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                e.subject,
                e.relation.id,
                e.relation.label,
                e.object,
                ev.source_name,
                opt(&ev.pmid),
                opt(&ev.year),
                opt(&ev.confidence),
                ev.sentence.as_deref().map(tsv::escape).unwrap_or_default(),
                e.inferred,
                e.negated,
                ev.derived_from
                    .as_deref()
                    .map(tsv::escape)
                    .unwrap_or_default(),
            );
        }
    }
    out
}

pub fn manifest(g: &KnowledgeGraph, config_hash: Option<String>) -> Manifest {
    Manifest {
        format_version: FORMAT_VERSION,
        registry_digest: g.registry().digest(),
        config_hash,
        node_count: g.node_count(),
        edge_count: g.edge_count(),
        negated_edge_count: g.negated_edge_count(),
        inferred_edge_count: g.inferred_edge_count(),
        stats: g.compute_stats(),
        registry: g.registry().iter().cloned().collect(),
    }
}

/// Writes the three snapshot files into `dir`, creating it if needed.
pub fn write_snapshot(
    g: &KnowledgeGraph,
    dir: &Path,
    config_hash: Option<String>,
) -> Result<Manifest> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let m = manifest(g, config_hash);
    let write = |name: &str, body: String| {
        let p = dir.join(name);
        fs::write(&p, body).map_err(|e| Error::io(&p, e))
    };
    write(NODES_FILE, nodes_tsv(g))?;
    write(EDGES_FILE, edges_tsv(g))?;
    let json = serde_json::to_string_pretty(&m).expect("manifest serializes");
    write(MANIFEST_FILE, json + "\n")?;
    Ok(m)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let p = dir.join(MANIFEST_FILE);
    let text = tsv::read_to_string(&p)?;
    serde_json::from_str(&text).map_err(|source| Error::Json { path: p, source })
}

/// Loads a snapshot and checks it against its manifest.
pub fn read_snapshot(dir: &Path) -> Result<(KnowledgeGraph, Manifest)> {
    let m = read_manifest(dir)?;
    let mpath = dir.join(MANIFEST_FILE);
    if m.format_version != FORMAT_VERSION {
        return Err(Error::parse(
            &mpath,
            1,
            format!("unsupported format_version {}", m.format_version),
        ));
    }
    let registry = Arc::new(RelationRegistry::new(m.registry.iter().cloned())?);
    if registry.digest() != m.registry_digest {
        return Err(Error::RegistryMismatch);
    }

    let mut g = KnowledgeGraph::new(registry.clone()).with_strict_endpoints(true);
    let npath = dir.join(NODES_FILE);
    for node in parse_nodes(&npath, &tsv::read_to_string(&npath)?)? {
        g.add_node(node)?;
    }

    let epath = dir.join(EDGES_FILE);
    let text = tsv::read_to_string(&epath)?;
    let width = EDGE_HEADER.len() + EXTRA_EDGE_COLUMNS.len();
    for row in tsv::rows_with_extra(&epath, &text, &EDGE_HEADER, &EXTRA_EDGE_COLUMNS, width)? {
        let mut edge = parse_edge_row(&epath, &row, &registry)?;
        edge.negated = match row.get(EDGE_HEADER.len() + 1) {
            "true" => true,
            "false" => false,
            other => {
                return Err(Error::parse(
                    &epath,
                    row.line,
                    format!("bad negated flag `{other}`"),
                ))
            }
        };
        edge.evidence[0].derived_from = row.opt(EDGE_HEADER.len() + 2).map(tsv::unescape);
        g.add_edge(edge).map_err(|e| e.at_line(&epath, row.line))?;
    }

    let counts = (
        g.node_count(),
        g.edge_count(),
        g.negated_edge_count(),
        g.inferred_edge_count(),
    );
    if counts
        != (
            m.node_count,
            m.edge_count,
            m.negated_edge_count,
            m.inferred_edge_count,
        )
    {
        return Err(Error::parse(
            &mpath,
            1,
            format!(
                "counts {counts:?} disagree with manifest {:?}",
                (
                    m.node_count,
                    m.edge_count,
                    m.negated_edge_count,
                    m.inferred_edge_count
                )
            ),
        ));
    }
    Ok((g, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::{apply_closure, ClosureConfig};
    use crate::graph::{Category, EdgeRecord, EvidenceRecord, EvidenceSource, NodeRecord};
    use crate::ingest::RelationMap;

    fn sample() -> KnowledgeGraph {
        let mut g = KnowledgeGraph::new(RelationMap::builtin().registry());
        g.add_node(NodeRecord::new(
            "CHEBI:23053",
            "catechin\twith tab",
            Category::Chemical,
        ))
        .unwrap();
        let lit = EvidenceRecord::literature(EvidenceSource::Reach, "123", Some(2014), "a\nb")
            .with_confidence(0.25);
        g.add_edge(EdgeRecord::new(
            "CHEBI:23053",
            RelationId::by_id("RO_0002434"),
            "CHEBI:7444",
            lit,
        ))
        .unwrap();
        g.add_edge(EdgeRecord::new(
            "CHEBI:7444",
            RelationId::by_id("RO_0002449"),
            "PR_000006130",
            EvidenceRecord::database("CTD"),
        ))
        .unwrap();
        g.add_edge(
            EdgeRecord::new(
                "CHEBI:7444",
                RelationId::by_id("RO_0002213"),
                "PR_000006130",
                EvidenceRecord::literature(EvidenceSource::Semrep, "9", Some(2001), "neg"),
            )
            .negate(),
        )
        .unwrap();
        apply_closure(&g, &ClosureConfig::default())
    }

    #[test]
    fn round_trip() {
        let g = sample();
        let dir = tempfile::tempdir().unwrap();
        let m = write_snapshot(&g, dir.path(), Some("abc".into())).unwrap();
        let (back, m2) = read_snapshot(dir.path()).unwrap();
        assert_eq!(m, m2);
        assert!(back.same_content(&g));
        assert_eq!(back.compute_stats(), g.compute_stats());
        assert_eq!(
            back.node("CHEBI:23053").unwrap().label,
            "catechin\twith tab"
        );
        let inv = back
            .edge("CHEBI:7444", "RO_0002434", "CHEBI:23053")
            .unwrap();
        assert!(inv.is_inferred());
        assert!(inv.evidence()[0].derived_from.is_some());
    }

    #[test]
    fn deterministic_bytes() {
        let g = sample();
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        write_snapshot(&g, a.path(), None).unwrap();
        let (back, _) = {
            write_snapshot(&g, b.path(), None).unwrap();
            read_snapshot(b.path()).unwrap()
        };
        write_snapshot(&back, b.path(), None).unwrap();
        for f in [NODES_FILE, EDGES_FILE, MANIFEST_FILE] {
            assert_eq!(
                fs::read(a.path().join(f)).unwrap(),
                fs::read(b.path().join(f)).unwrap(),
                "{f}"
            );
        }
    }

    #[test]
    fn tampered_counts_rejected() {
        let g = sample();
        let dir = tempfile::tempdir().unwrap();
        write_snapshot(&g, dir.path(), None).unwrap();
        let p = dir.path().join(EDGES_FILE);
        let text = fs::read_to_string(&p).unwrap();
        let trimmed: Vec<&str> = text.lines().take(2).collect();
        fs::write(&p, trimmed.join("\n") + "\n").unwrap();
        assert!(read_snapshot(dir.path()).is_err());
    }
}
