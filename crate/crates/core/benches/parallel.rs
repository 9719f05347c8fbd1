//! Parallel core against a single-thread pool on the same workload.
//!
//! Build with `--no-default-features` to time the sequential code path
//! itself; the one-thread pool approximates it with the feature on.

use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};
use npdi_graph::closure::{close_in_place, ClosureConfig};
use npdi_graph::ingest::{
    build_literature_graph, EntityMap, FilterConfig, Predication, RelationMap,
};
use npdi_graph::query::{shortest_paths, QueryOptions};
use npdi_graph::synth::{self, SynthConfig};
use npdi_graph::KnowledgeGraph;
use rayon::{ThreadPool, ThreadPoolBuilder};

const NODES: usize = 20_000;
const PREDICATIONS: usize = 100_000;

fn pools() -> Vec<(String, ThreadPool)> {
    let one = ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let all = ThreadPoolBuilder::new().build().unwrap();
    let n = all.current_num_threads();
    vec![("single".into(), one), (format!("default-{n}"), all)]
}

fn input() -> Vec<Predication> {
    synth::predications(&SynthConfig::new(NODES, PREDICATIONS, 42))
}

fn build(preds: &[Predication]) -> KnowledgeGraph {
    build_literature_graph(
        preds,
        &RelationMap::builtin(),
        &EntityMap::default(),
        &FilterConfig::builtin(),
    )
    .0
}

fn bench(c: &mut Criterion) {
    let preds = input();
    let graph = build(&preds);
    let mut closed = graph.clone();
    close_in_place(&mut closed, &ClosureConfig::default());
    let pairs: Vec<(String, String)> = synth::query_pairs(NODES, 4_000, 9)
        .into_iter()
        .filter(|(a, b)| closed.node_idx(a).is_some() && closed.node_idx(b).is_some())
        .take(2_000)
        .collect();

    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new("literature_build", &name), |b| {
            b.iter(|| pool.install(|| build(&preds)))
        });
        group.bench_function(BenchmarkId::new("closure", &name), |b| {
            b.iter_batched(
                || graph.clone(),
                |mut g| pool.install(|| close_in_place(&mut g, &ClosureConfig::default())),
                BatchSize::LargeInput,
            )
        });
        group.bench_function(BenchmarkId::new("batch_paths", &name), |b| {
            b.iter(|| pool.install(|| shortest_paths(&closed, &pairs, &QueryOptions::directed())))
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
