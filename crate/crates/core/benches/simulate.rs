use std::path::PathBuf;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use prefdial::engine::{PolicyConfig, Simulator};
use prefdial::evalhub::{build_gold, Task};
use prefdial::{load_catalog, Ontology, SpdMode};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn bench_simulate(c: &mut Criterion) {
    let dir = fixtures();
    let catalog = load_catalog(dir.join("scenes.json"), dir.join("metadata.json")).unwrap();
    let ontology = Ontology::load(dir.join("ontology.json"), &catalog.value_space()).unwrap();
    let config = PolicyConfig::load(dir.join("policy.json")).unwrap();
    let sim = Simulator::new(&catalog, &ontology, &config).unwrap();

    const N: usize = 1000;
    let mut group = c.benchmark_group("simulate");
    group.throughput(Throughput::Elements(N as u64));
    group.sample_size(10);
    for (label, jobs) in [("sequential", 1), ("parallel", 0)] {
        group.bench_with_input(BenchmarkId::new(label, N), &jobs, |b, &jobs| {
            b.iter(|| sim.run(0..N, 42, jobs).unwrap());
        });
    }
    group.finish();

    let flows = sim.run(0..N, 42, 0).unwrap();
    let mut group = c.benchmark_group("gold_spd");
    group.throughput(Throughput::Elements(N as u64));
    group.sample_size(10);
    group.bench_function("build", |b| {
        b.iter(|| build_gold(&flows, &ontology, &catalog, Task::Spd, SpdMode::Cumulative).unwrap());
    });
    group.finish();
}

criterion_group!(benches, bench_simulate);
criterion_main!(benches);
