use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use hopforge_bench::{graph, scene};
use hopforge_core::kg::{build_graph, DetectionConfig};
use hopforge_core::synth::{
    builtin_templates, synthesize_dataset, SynthesisOptions, SynthesisPlan,
};
use hopforge_core::validate::validate_dataset;

fn graph_construction(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_graph");
    group.sample_size(20);
    for entities in [10, 25, 50] {
        let tubes = scene(entities, entities * 3, 1000, 7);
        group.throughput(Throughput::Elements((entities * (entities - 1) / 2) as u64));
        group.bench_with_input(BenchmarkId::from_parameter(entities), &tubes, |b, tubes| {
            b.iter(|| build_graph(black_box(tubes), &DetectionConfig::default()).unwrap())
        });
    }
    group.finish();
}

fn synthesis(c: &mut Criterion) {
    let g = graph(50, 150, 1000, 7);
    let templates = builtin_templates();
    let mut group = c.benchmark_group("synthesize_dataset");
    group.sample_size(10);
    for per_depth in [250usize, 2500] {
        let plan = SynthesisPlan::new((1..=4).map(|d| (d, per_depth)));
        group.throughput(Throughput::Elements(plan.total() as u64));
        group.bench_with_input(
            BenchmarkId::from_parameter(plan.total()),
            &plan,
            |b, plan| {
                b.iter(|| {
                    synthesize_dataset(&g, plan, &templates, &SynthesisOptions::default()).unwrap()
                })
            },
        );
    }
    group.finish();
}

fn validation(c: &mut Criterion) {
    let g = graph(50, 150, 1000, 7);
    let plan = SynthesisPlan::new((1..=4).map(|d| (d, 500)));
    let options = SynthesisOptions {
        enforce_minimality: false,
        ..SynthesisOptions::default()
    };
    let samples = synthesize_dataset(&g, &plan, &builtin_templates(), &options)
        .unwrap()
        .samples;
    c.bench_function("validate_dataset/2000", |b| {
        b.iter_batched(
            || samples.clone(),
            |mut s| validate_dataset(&g, &mut s, 4),
            criterion::BatchSize::LargeInput,
        )
    });
}

criterion_group!(benches, graph_construction, synthesis, validation);
criterion_main!(benches);
