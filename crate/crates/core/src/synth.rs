//! Seeded synthetic predication streams for scale tests and benchmarks.
//!
//! Transitive-relation edges only run from one layer of nodes to the next,
//! so their closure stays small however large the stream gets.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::ingest::{ExtractionSource, Predication};

#[derive(Clone, Debug)]
pub struct SynthConfig {
    pub nodes: usize,
    pub predications: usize,
    pub seed: u64,
    /// Share of predications using a symmetric relation.
    pub symmetric_share: f64,
    /// Share of predications using a transitive relation.
    pub transitive_share: f64,
    /// Share routed to the negated store.
    pub negated_share: f64,
    /// Number of node layers the transitive edges run through.
    pub layers: usize,
}

impl SynthConfig {
    pub fn new(nodes: usize, predications: usize, seed: u64) -> Self {
        SynthConfig {
            nodes,
            predications,
            seed,
            symmetric_share: 0.2,
            transitive_share: 0.1,
            negated_share: 0.01,
            layers: 4,
        }
    }
}

const OTHER_RELATIONS: [&str; 5] = [
    "inhibits",
    "augments",
    "disrupts",
    "affects",
    "associated_with",
];

pub fn node_id(i: usize) -> String {
    format!("SYN:{i:07}")
}

/// Generates `cfg.predications` SemRep-style predications with pre-linked
/// endpoint ids `SYN:0000000 ..`.
pub fn predications(cfg: &SynthConfig) -> Vec<Predication> {
    assert!(
        cfg.nodes >= 2 * cfg.layers.max(1),
        "too few nodes for the layer count"
    );
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let layer_size = cfg.nodes / cfg.layers.max(1);
    (0..cfg.predications)
        .map(|i| {
            let roll: f64 = rng.gen();
            let (relation, s, o) = if roll < cfg.transitive_share {
                let layer = rng.gen_range(0..cfg.layers - 1);
                let s = layer * layer_size + rng.gen_range(0..layer_size);
                let o = (layer + 1) * layer_size + rng.gen_range(0..layer_size);
                ("stimulates", s, o)
            } else {
                let s = rng.gen_range(0..cfg.nodes);
                let mut o = rng.gen_range(0..cfg.nodes - 1);
                if o >= s {
                    o += 1;
                }
                let rel = if roll < cfg.transitive_share + cfg.symmetric_share {
                    "interacts_with"
                } else {
                    OTHER_RELATIONS[rng.gen_range(0..OTHER_RELATIONS.len())]
                };
                (rel, s, o)
            };
            let negated = rng.gen_bool(cfg.negated_share);
            let relation_raw = if negated {
                format!("neg_{relation}")
            } else {
                relation.to_string()
            };
            let (sid, oid) = (node_id(s), node_id(o));
            Predication {
                subject_text: sid.clone(),
                subject_id: Some(sid),
                relation_raw,
                object_text: oid.clone(),
                object_id: Some(oid),
                source: ExtractionSource::Semrep,
                pmid: (10_000_000 + i).to_string(),
                year: rng.gen_range(1990..=2022),
                confidence: None,
                sentence: format!("synthetic sentence {i}"),
                subject_semtype: None,
                object_semtype: None,
            }
        })
        .collect()
}

/// `count` source/target pairs drawn from the synthetic node ids.
pub fn query_pairs(nodes: usize, count: usize, seed: u64) -> Vec<(String, String)> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (
                node_id(rng.gen_range(0..nodes)),
                node_id(rng.gen_range(0..nodes)),
            )
        })
        .collect()
}
