//! Brute-force oracles and fixture helpers shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use npdi_graph::closure::ClosureConfig;
use npdi_graph::eval::{Polarity, PolarityTable};
use npdi_graph::ingest::{build_curated_graph, RelationMap};
use npdi_graph::{
    EdgeRecord, EvidenceRecord, EvidenceSource, KnowledgeGraph, RelationId, RelationRegistry,
};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(rel)
}

pub fn registry() -> Arc<RelationRegistry> {
    RelationMap::builtin().registry()
}

pub fn lit(pmid: &str, year: i32) -> EvidenceRecord {
    EvidenceRecord::literature(EvidenceSource::Semrep, pmid, Some(year), "s")
}

pub fn figures_graph() -> KnowledgeGraph {
    build_curated_graph(
        registry(),
        &[&fixture("figures/nodes.tsv")],
        &[&fixture("figures/edges.tsv")],
        true,
    )
    .expect("figures fixture loads")
}

/// Node names whose string order differs from their numeric order.
pub fn node_name(i: usize) -> String {
    format!("N{i}")
}

/// Plain edge list: (subject, relation id, object).
pub type Triple = (usize, &'static str, usize);

pub fn graph_from(triples: &[Triple], nodes: usize, rng: &mut StdRng) -> KnowledgeGraph {
    let mut g = KnowledgeGraph::new(registry());
    // nodes enter in a shuffled order so indices and ids disagree
    let mut order: Vec<usize> = (0..nodes).collect();
    order.shuffle(rng);
    for i in order {
        g.add_node(npdi_graph::NodeRecord::new(
            node_name(i),
            node_name(i),
            npdi_graph::Category::Other,
        ))
        .unwrap();
    }
    for &(s, r, o) in triples {
        // evidence depends on the triple only, so edge order is irrelevant
        let ev = lit(
            &format!("{s}-{r}-{o}"),
            2000 + ((7 * s + 3 * o) % 20) as i32,
        );
        g.add_edge(EdgeRecord::new(
            node_name(s),
            RelationId::by_id(r),
            node_name(o),
            ev,
        ))
        .unwrap();
    }
    g
}

pub fn random_triples(
    rng: &mut StdRng,
    nodes: usize,
    max_edges: usize,
    rels: &[&'static str],
) -> Vec<Triple> {
    let m = rng.gen_range(0..=max_edges);
    (0..m)
        .map(|_| {
            (
                rng.gen_range(0..nodes),
                rels[rng.gen_range(0..rels.len())],
                rng.gen_range(0..nodes),
            )
        })
        .collect()
}

/// Boolean-matrix closure of one relation: symmetric and/or Warshall.
pub fn matrix_closure(
    n: usize,
    pairs: &BTreeSet<(usize, usize)>,
    symmetric: bool,
    transitive: bool,
) -> BTreeSet<(usize, usize)> {
    let mut m = vec![vec![false; n]; n];
    for &(a, b) in pairs {
        m[a][b] = true;
    }
    loop {
        let before = m.clone();
        if symmetric {
            for a in 0..n {
                for b in 0..n {
                    if m[a][b] {
                        m[b][a] = true;
                    }
                }
            }
        }
        if transitive {
            for k in 0..n {
                for i in 0..n {
                    if m[i][k] {
                        for j in 0..n {
                            if m[k][j] {
                                m[i][j] = true;
                            }
                        }
                    }
                }
            }
        }
        if m == before {
            break;
        }
    }
    let mut out = BTreeSet::new();
    for (a, row) in m.iter().enumerate() {
        for (b, &v) in row.iter().enumerate() {
            if v {
                out.insert((a, b));
            }
        }
    }
    out
}

/// Expected edge set (by relation) after closing `triples` under `cfg`.
pub fn closure_oracle(
    n: usize,
    triples: &[Triple],
    cfg: &ClosureConfig,
) -> BTreeMap<String, BTreeSet<(usize, usize)>> {
    let mut by_rel: BTreeMap<String, BTreeSet<(usize, usize)>> = BTreeMap::new();
    for &(s, r, o) in triples {
        by_rel.entry(r.to_string()).or_default().insert((s, o));
    }
    by_rel
        .into_iter()
        .map(|(r, pairs)| {
            let closed = matrix_closure(
                n,
                &pairs,
                cfg.symmetric.contains(&r),
                cfg.transitive.contains(&r),
            );
            (r, closed)
        })
        .collect()
}

/// Edge set of `g` by relation, with node names parsed back to numbers.
pub fn edge_sets(g: &KnowledgeGraph) -> BTreeMap<String, BTreeSet<(usize, usize)>> {
    let num = |id: &str| id[1..].parse::<usize>().unwrap();
    let mut out: BTreeMap<String, BTreeSet<(usize, usize)>> = BTreeMap::new();
    for e in g.edges() {
        out.entry(e.relation().id.clone())
            .or_default()
            .insert((num(e.subject()), num(e.object())));
    }
    out
}

/// Single-source breadth-first distances over a plain adjacency list.
pub fn bfs_oracle(
    n: usize,
    arcs: &[(usize, usize)],
    directed: bool,
    src: usize,
) -> Vec<Option<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in arcs {
        adj[a].push(b);
        if !directed {
            adj[b].push(a);
        }
    }
    let mut dist = vec![None; n];
    dist[src] = Some(0);
    let mut q = VecDeque::from([src]);
    while let Some(u) = q.pop_front() {
        for &w in &adj[u] {
            if dist[w].is_none() {
                dist[w] = Some(dist[u].unwrap() + 1);
                q.push_back(w);
            }
        }
    }
    dist
}

/// All shortest paths from `s` to `t` by exhaustive search (small graphs).
pub fn all_shortest_paths(
    n: usize,
    arcs: &[(usize, usize)],
    directed: bool,
    s: usize,
    t: usize,
) -> Vec<Vec<usize>> {
    let Some(d) = bfs_oracle(n, arcs, directed, s)[t] else {
        return Vec::new();
    };
    let mut adj = vec![BTreeSet::new(); n];
    for &(a, b) in arcs {
        adj[a].insert(b);
        if !directed {
            adj[b].insert(a);
        }
    }
    let mut out = Vec::new();
    let mut stack = vec![vec![s]];
    while let Some(p) = stack.pop() {
        let last = *p.last().unwrap();
        if p.len() == d + 1 {
            if last == t {
                out.push(p);
            }
            continue;
        }
        for &w in &adj[last] {
            let mut q = p.clone();
            q.push(w);
            stack.push(q);
        }
    }
    out
}

/// Every (negative, positive) edge pair sharing endpoints, by a plain double loop.
pub fn contradiction_oracle(
    g: &KnowledgeGraph,
    pol: &PolarityTable,
) -> Vec<(EdgeRecord, EdgeRecord)> {
    let edges: Vec<EdgeRecord> = g.edges().map(|e| e.to_record()).collect();
    let mut out = Vec::new();
    for a in &edges {
        for b in &edges {
            if a.subject == b.subject
                && a.object == b.object
                && pol.polarity(&a.relation.id) == Polarity::Negative
                && pol.polarity(&b.relation.id) == Polarity::Positive
            {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    out.sort();
    out
}
