mod common;

use std::collections::BTreeSet;

use common::*;
use npdi_graph::closure::{apply_closure, ClosureConfig};
use npdi_graph::ingest::{
    build_curated_graph, build_literature_graph, parse_predication_file, EntityMap, FilterConfig,
    Predication, RelationMap,
};
use npdi_graph::query::{
    direct_edges, find_metapaths, shortest_path, MetaPathTemplate, QueryOptions, TargetKind,
    TargetSet,
};
use npdi_graph::snapshot::{edges_tsv, nodes_tsv};
use npdi_graph::{merge_graphs, synth, KnowledgeGraph};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

struct Desk {
    curated: KnowledgeGraph,
    predications: Vec<Predication>,
    entities: EntityMap,
}

fn desk() -> Desk {
    Desk {
        curated: build_curated_graph(
            registry(),
            &[&fixture("desk/nodes.tsv")],
            &[&fixture("desk/edges.tsv")],
            true,
        )
        .unwrap(),
        predications: parse_predication_file(&fixture("desk/predications.jsonl")).unwrap(),
        entities: EntityMap::from_file(&fixture("desk/entity_map.tsv")).unwrap(),
    }
}

fn literature(p: &[Predication], entities: &EntityMap) -> KnowledgeGraph {
    build_literature_graph(
        p,
        &RelationMap::builtin(),
        entities,
        &FilterConfig::builtin(),
    )
    .0
}

fn serialize(g: &KnowledgeGraph) -> (String, String) {
    (nodes_tsv(g), edges_tsv(g))
}

#[test]
fn desk_ingest_report() {
    let d = desk();
    let (lit, report) = build_literature_graph(
        &d.predications,
        &RelationMap::builtin(),
        &d.entities,
        &FilterConfig::builtin(),
    );
    assert_eq!(
        (
            report.input,
            report.accepted,
            report.rejected_by_filter,
            report.dropped_unmapped
        ),
        (12, 7, 4, 1)
    );
    assert_eq!((report.negated, report.deduplicated), (1, 1));
    let reasons: Vec<usize> = report.rejected_reasons.values().copied().collect();
    assert_eq!(reasons.iter().sum::<usize>(), 4);
    assert!(report.is_conserved());
    assert_eq!(
        (lit.node_count(), lit.edge_count(), lit.negated_edge_count()),
        (5, 5, 1)
    );
}

#[test]
fn desk_closure_scopes() {
    let d = desk();
    let lit = literature(&d.predications, &d.entities);
    let cfg = ClosureConfig::default();

    let none = merge_graphs(&d.curated, &lit).unwrap();
    let lit_scope = merge_graphs(&d.curated, &apply_closure(&lit, &cfg)).unwrap();
    let merged_scope = apply_closure(&none, &cfg);

    let row = |g: &KnowledgeGraph| {
        (
            g.node_count(),
            g.edge_count(),
            g.inferred_edge_count(),
            g.negated_edge_count(),
        )
    };
    assert_eq!(row(&none), (7, 11, 0, 1));
    assert_eq!(row(&lit_scope), (7, 12, 1, 1));
    assert_eq!(row(&merged_scope), (7, 14, 3, 1));

    let s = merged_scope.compute_stats();
    assert_eq!(s.average_degree, 2.0);
    assert!((s.node_density - 14.0 / 42.0).abs() < 1e-12);
}

#[test]
fn merge_is_a_set_union() {
    let d = desk();
    let lit = literature(&d.predications, &d.entities);
    let merged = merge_graphs(&d.curated, &lit).unwrap();
    let keys = |g: &KnowledgeGraph| -> BTreeSet<String> {
        g.edges().map(|e| e.to_record().key()).collect()
    };
    let ids =
        |g: &KnowledgeGraph| -> BTreeSet<String> { g.nodes().map(|n| n.id.clone()).collect() };
    assert_eq!(keys(&merged), &keys(&d.curated) | &keys(&lit));
    assert_eq!(ids(&merged), &ids(&d.curated) | &ids(&lit));
    // every evidence record survives
    for g in [&d.curated, &lit] {
        for e in g.edges() {
            let m = merged
                .edge(e.subject(), &e.relation().id, e.object())
                .unwrap();
            assert!(e.evidence().iter().all(|ev| m.evidence().contains(ev)));
        }
    }
    // argument order only changes which placeholder label wins, never the edges
    let swapped = merge_graphs(&lit, &d.curated).unwrap();
    assert_eq!(edges_tsv(&swapped), edges_tsv(&merged));
}

#[test]
fn desk_negated_edge_is_invisible_to_queries() {
    let d = desk();
    let lit = literature(&d.predications, &d.entities);
    let g = apply_closure(
        &merge_graphs(&d.curated, &lit).unwrap(),
        &ClosureConfig::default(),
    );
    let neg: Vec<_> = g.negated_edges().map(|e| e.to_record()).collect();
    assert_eq!(neg.len(), 1);
    let (s, o) = (&neg[0].subject, &neg[0].object);
    for opts in [QueryOptions::directed(), QueryOptions::undirected()] {
        let direct = direct_edges(&g, s, o, &opts).unwrap();
        assert!(!direct.is_empty());
        for e in &direct {
            assert!(!e.negated);
            // the asserted edge of the same relation keeps only its own evidence
            assert!(neg[0].evidence.iter().all(|ev| !e.evidence.contains(ev)));
        }
        if let Some(p) = shortest_path(&g, s, o, &opts).unwrap() {
            assert!(p.steps.iter().flat_map(|st| &st.edges).all(|e| !e.negated));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn shuffled_predications_build_identical_graphs(seed in any::<u64>()) {
        let preds = synth::predications(&synth::SynthConfig::new(40, 200, 5));
        let entities = EntityMap::default();
        let cfg = ClosureConfig::default();
        let base = serialize(&apply_closure(&literature(&preds, &entities), &cfg));
        let mut shuffled = preds.clone();
        shuffled.shuffle(&mut StdRng::seed_from_u64(seed));
        let (g, report) = build_literature_graph(&shuffled, &RelationMap::builtin(), &entities, &FilterConfig::builtin());
        prop_assert!(report.is_conserved());
        prop_assert_eq!(serialize(&apply_closure(&g, &cfg)), base);
    }

    #[test]
    fn negated_predications_never_reach_query_results(seed in any::<u64>()) {
        let mut cfg = synth::SynthConfig::new(30, 150, seed);
        cfg.negated_share = 0.3;
        let preds = synth::predications(&cfg);
        let g = apply_closure(&literature(&preds, &EntityMap::default()), &ClosureConfig::default());
        for e in g.negated_edges() {
            prop_assert!(g.edge(e.subject(), &e.relation().id, e.object()).is_none_or(|m| !m.is_negated()));
            for opts in [QueryOptions::directed(), QueryOptions::undirected()] {
                for r in direct_edges(&g, e.subject(), e.object(), &opts).unwrap() {
                    prop_assert!(!r.negated);
                }
                if let Some(p) = shortest_path(&g, e.subject(), e.object(), &opts).unwrap() {
                    for x in p.steps.iter().flat_map(|s| &s.edges) {
                        prop_assert!(!x.negated);
                    }
                }
            }
        }
    }
}

/// (natural-product nodes, drug, enzymes, transporters)
type Case<'a> = (&'a [&'a str], &'a str, &'a [&'a str], &'a [&'a str]);

const CYP2D6: &str = "PR_000006121";
const CYP3A4: &str = "PR_000006130";
const UGT: &str = "PR_000017044";
const PGP: &str = "PR_000001891";

#[test]
fn metapath_targets_on_figures_fixture() {
    let g = figures_graph();
    let targets = TargetSet::from_file(&fixture("figures/targets.tsv")).unwrap();
    let templates = MetaPathTemplate::defaults();
    let opts = QueryOptions::directed();
    let kratom = ["NCBITaxon:170351", "CHEBI:6956"];
    let tea = ["NCBITaxon:4442", "CHEBI:4806", "CHEBI:70255", "CHEBI:23053"];
    let cases: [Case; 4] = [
        (&kratom, "CHEBI:6931", &[CYP2D6, CYP3A4], &[PGP]),
        (&kratom, "CHEBI:8707", &[CYP3A4], &[PGP]),
        (&kratom, "CHEBI:9943", &[CYP2D6, CYP3A4], &[]),
        (&tea, "CHEBI:8772", &[CYP3A4, UGT], &[]),
    ];
    for (np, drug, enzymes, transporters) in cases {
        let r = find_metapaths(&g, np, drug, &templates, &targets, &opts).unwrap();
        let e: Vec<&str> = r
            .targets(TargetKind::Enzyme)
            .iter()
            .map(String::as_str)
            .collect();
        let t: Vec<&str> = r
            .targets(TargetKind::Transporter)
            .iter()
            .map(String::as_str)
            .collect();
        assert_eq!(e, enzymes, "enzymes for {drug}");
        assert_eq!(t, transporters, "transporters for {drug}");
    }
}
