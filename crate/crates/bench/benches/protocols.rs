use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use tsad_eval::protocols::{score_padf_binary, score_padf_probabilistic};
use tsad_eval::{best_f1, Candidates, DecaySpec, PrecisionMode, ProtocolConfig, ThresholdSpec};
use tsad_eval_bench::{binary_predictions, periodic_labels, probabilistic_predictions, uniform_scores};

const SIZES: [usize; 3] = [10_000, 100_000, 1_000_000];

fn padf_scoring(c: &mut Criterion) {
    let decay = DecaySpec::default();
    let mut group = c.benchmark_group("padf");
    for tau in SIZES {
        let labels = periodic_labels(tau, 1000, 50);
        let scores = uniform_scores(tau, 1);
        let binary = binary_predictions(&scores, 0.95);
        let prob = probabilistic_predictions(&scores);
        group.throughput(Throughput::Elements(tau as u64));
        group.bench_with_input(BenchmarkId::new("binary", tau), &tau, |b, _| {
            b.iter(|| score_padf_binary(black_box(&labels), black_box(&binary), &decay, PrecisionMode::Decayed))
        });
        group.bench_with_input(BenchmarkId::new("probabilistic", tau), &tau, |b, _| {
            b.iter(|| score_padf_probabilistic(black_box(&labels), black_box(&prob), &decay, PrecisionMode::Decayed))
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("best_f1");
    group.sample_size(10);
    let configs = [
        ("pa", ProtocolConfig::point_adjust()),
        ("padf", ProtocolConfig::padf(0.9).unwrap()),
    ];
    for tau in SIZES {
        let labels = periodic_labels(tau, 1000, 50);
        let scores = uniform_scores(tau, 2);
        group.throughput(Throughput::Elements(tau as u64));
        for (name, config) in &configs {
            group.bench_with_input(BenchmarkId::new(*name, tau), &tau, |b, _| {
                b.iter(|| best_f1(&labels, black_box(&scores), config, ThresholdSpec::Sweep(Candidates::UniqueScores)))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, padf_scoring, sweep);
criterion_main!(benches);
