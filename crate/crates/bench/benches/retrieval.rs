use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use synroute::corpus::RankedList;
use synroute::features::{assemble_raw, featurize};
use synroute::retrieval::{entity_seed_weights, fact_scores, run_ppr, select_and_rerank};
use synroute::router::{weighted_rrf, RrfConfig};
use synroute::Mode;
use synroute_bench::fixture;

fn bench_paths(c: &mut Criterion) {
    let f = fixture(1000, 64, 0.25).expect("fixture builds");
    let e = &f.engine;
    let mut g = c.benchmark_group("retrieve");
    for mode in [Mode::DenseOnly, Mode::GraphOnly, Mode::Full] {
        g.bench_with_input(BenchmarkId::from_parameter(mode), &mode, |b, &mode| {
            let mut i = 0;
            b.iter(|| {
                let q = &f.workload.queries[i % f.workload.len()];
                i += 1;
                black_box(e.retrieve_evidence(q, f.parses.get(&q.id), mode).unwrap())
            })
        });
    }
    g.finish();

    let q = f.workload.queries.iter().find(|q| q.text.contains("death")).expect("a multi-hop query");
    let pq = &f.parses[&q.id];
    let (graph, facts) = e.graph.as_ref().unwrap();
    let emb = e.encoder.encode(&q.text);
    let scores = fact_scores(&emb, facts).unwrap();
    let selected = select_and_rerank(&q.text, facts, &scores, 30, e.reranker.as_ref()).unwrap();
    let r0 = entity_seed_weights(graph, facts, &selected, &scores, 10).unwrap();

    c.bench_function("stage/encode", |b| b.iter(|| black_box(e.encoder.encode(&q.text))));
    c.bench_function("stage/dense_search", |b| {
        b.iter(|| black_box(e.dense.as_ref().unwrap().search(&emb, 5).unwrap()))
    });
    c.bench_function("stage/fact_scores", |b| b.iter(|| black_box(fact_scores(&emb, facts).unwrap())));
    c.bench_function("stage/ppr", |b| b.iter(|| black_box(run_ppr(graph, &r0, &e.cfg.graph.ppr).unwrap())));
    c.bench_function("stage/featurize_raw", |b| b.iter(|| black_box(assemble_raw(pq).unwrap())));
    let schema = e.schema.as_ref().unwrap();
    let x = featurize(pq, schema).unwrap();
    c.bench_function("stage/adapter_score", |b| {
        b.iter(|| black_box(e.adapter.as_ref().unwrap().score(&x.values).unwrap()))
    });

    let list = |off: usize| RankedList {
        entries: (0..5).map(|i| (format!("p{:04}", i * 3 + off), 1.0 / (i + 1) as f64)).collect(),
    };
    let (a, b2) = (list(0), list(1));
    c.bench_function("stage/wrrf", |b| b.iter(|| black_box(weighted_rrf(&a, &b2, 0.6, &RrfConfig::default(), 5))));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(30);
    targets = bench_paths
}
criterion_main!(benches);
