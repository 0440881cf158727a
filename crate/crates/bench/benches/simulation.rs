use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use dtn_tradesim_bench::{fixture_network, rng, single_run_config};
use dtn_tradesim_core::routing::ShortestPathTree;
use dtn_tradesim_core::{
    dijkstra_path, run_simulation, simulate_packet, CostKind, NetworkConfig, NetworkState,
};
use std::hint::black_box;

fn bench_network(c: &mut Criterion) {
    let cfg = NetworkConfig::default();
    c.bench_function("generate_network", |b| {
        let mut r = rng(1);
        b.iter(|| NetworkState::generate(black_box(&cfg), &mut r).unwrap())
    });
    c.bench_function("perturb", |b| {
        let mut net = fixture_network(2);
        let mut r = rng(3);
        b.iter(|| net.perturb(&mut r, black_box(0.05)).unwrap())
    });
}

fn bench_routing(c: &mut Criterion) {
    let net = fixture_network(4);
    for kind in CostKind::ALL {
        c.bench_function(&format!("dijkstra_path/{kind:?}"), |b| {
            b.iter(|| dijkstra_path(&net, kind, net.probe(), net.ground()).unwrap())
        });
    }
    let costs = net.cost_matrix(CostKind::QualityComplement);
    c.bench_function("shortest_path_tree", |b| {
        b.iter(|| ShortestPathTree::toward(black_box(&costs), net.ground()))
    });
}

fn bench_simulation(c: &mut Criterion) {
    let base = fixture_network(5);
    c.bench_function("simulate_packet", |b| {
        let mut r = rng(6);
        b.iter_batched(
            || base.clone(),
            |mut net| simulate_packet(&mut net, &mut r, 0.05, 0).unwrap(),
            BatchSize::SmallInput,
        )
    });
    let cfg = single_run_config();
    let mut group = c.benchmark_group("run");
    group.sample_size(10);
    group.bench_function("run_simulation_500_packets", |b| {
        let mut r = rng(7);
        b.iter(|| run_simulation(&cfg, &mut r).unwrap())
    });
    group.finish();
}

criterion_group!(network, bench_network);
criterion_group!(routing, bench_routing);
criterion_group!(simulation, bench_simulation);
criterion_main!(network, routing, simulation);
