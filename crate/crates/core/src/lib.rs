//! Construction and querying of a heterogeneous biomedical knowledge graph
//! for natural product–drug interaction research.
//!
//! The pipeline is: curated node/edge files and literature predications are
//! ingested ([`ingest`]), literature edges are enriched by symmetric and
//! transitive closure ([`closure`]), the two graphs are merged
//! ([`graph::merge_graphs`]), and the result is queried for direct edges,
//! shortest paths and meta-paths ([`query`]) or evaluated against curated
//! ground truth ([`eval`]). [`snapshot`] reads and writes the on-disk form.

pub mod closure;
pub mod error;
pub mod eval;
pub mod graph;
pub mod ingest;
pub mod par;
pub mod query;
pub mod snapshot;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{
    merge_graphs, percent_change, AddOutcome, Category, EdgeRecord, EdgeRef, EvidenceRecord,
    EvidenceSource, GraphStats, KnowledgeGraph, NodeIdx, NodeRecord, PercentChange, RelationId,
    RelationRegistry,
};
