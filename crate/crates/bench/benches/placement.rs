use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spanfl_core::graph::{eigenvector_centrality, generate, GenOptions};
use spanfl_core::placement::{place_maxspan, place_maxspan_hopping, CENTRALITY_MAX_ITER, CENTRALITY_TOL};
use spanfl_core::rng::seeded;
use spanfl_core::sim::run_simulation;
use spanfl_core::{GraphFamily, HoppingParams, SimulationConfig, Strategy};

fn er(n: usize) -> spanfl_core::Graph {
    let opts = GenOptions {
        require_strong_connectivity: false,
        ..Default::default()
    };
    generate(GraphFamily::ErdosRenyi { p: 0.2 }, n, opts, &mut seeded(n as u64)).unwrap()
}

fn placement(c: &mut Criterion) {
    let mut group = c.benchmark_group("place_maxspan");
    for n in [50, 100, 200, 400] {
        let g = er(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| place_maxspan(g, n / 5, &mut seeded(1)).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("eigenvector_centrality");
    for n in [50, 200] {
        let g = er(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| eigenvector_centrality(g, CENTRALITY_TOL, CENTRALITY_MAX_ITER).unwrap())
        });
    }
    group.finish();

    let g = er(100);
    c.bench_function("place_maxspan_hopping/100", |b| {
        b.iter(|| place_maxspan_hopping(&g, 20, &HoppingParams::default(), &mut seeded(1)).unwrap())
    });
}

fn simulation(c: &mut Criterion) {
    let cfg = SimulationConfig::new(GraphFamily::DirectedGeometric { r: 0.4 }, 25, Strategy::MaxSpan, 5, 1);
    let mut group = c.benchmark_group("simulation");
    group.sample_size(10);
    group.bench_function("dg25_60_epochs_pair", |b| b.iter(|| run_simulation(&cfg).unwrap()));
    group.finish();
}

criterion_group!(benches, placement, simulation);
criterion_main!(benches);
