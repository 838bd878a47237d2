use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use crabs_core::resolver::{HeuristicResolver, ResolverConfig};
use crabs_core::syntax::AnalyzerOptions;
use crabs_core::synth::{generate_corpus, generate_large, SynthConfig};
use crabs_core::{run_batch, run_pipeline, EstimateMode, Execution};

fn corpus(c: &mut Criterion) {
    let notebooks = generate_corpus(42, 200, SynthConfig::default());
    let options = AnalyzerOptions::default();
    let config = ResolverConfig::default();
    let resolver = HeuristicResolver::new(false);
    let mut group = c.benchmark_group("corpus-200");
    for (label, exec) in [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel { threads: 0 }),
    ] {
        group.bench_with_input(BenchmarkId::from_parameter(label), &exec, |b, &exec| {
            b.iter(|| run_batch(&notebooks, &options, EstimateMode::Resolved, &resolver, &config, exec))
        });
    }
    group.finish();
}

fn large(c: &mut Criterion) {
    let nb = generate_large(7, 76, 1100);
    let options = AnalyzerOptions::default();
    let resolver = HeuristicResolver::new(false);
    let mut group = c.benchmark_group("large-76-cells");
    for (label, jobs) in [("sequential", 1), ("parallel", 8)] {
        let config = ResolverConfig {
            concurrency: jobs,
            ..ResolverConfig::default()
        };
        group.bench_function(label, |b| {
            b.iter(|| run_pipeline(&nb, &options, EstimateMode::Resolved, &resolver, &config).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, corpus, large);
criterion_main!(benches);
