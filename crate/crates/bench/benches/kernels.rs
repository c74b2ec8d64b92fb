use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use kelab::charts::complex_hessian;
use kelab::gh::{Provenance, SampledMetricSpace};
use kelab::solver::{newton_solve, SolveOptions, DEFAULT_NODES};
use kelab::weighted::shell_samples;
use kelab::{GluingParams, HessianMode, PotentialKind, PotentialSpec};

fn params() -> GluingParams {
    GluingParams::new(1.0 / 32.0).unwrap()
}

fn hessian(c: &mut Criterion) {
    let p = params();
    let spec = PotentialSpec::new(PotentialKind::Preglued, p);
    let pts = shell_samples(p.delta().powf(1.2), 1.5, p.t(), 64, 0).unwrap();
    let mut group = c.benchmark_group("hessian");
    group.bench_function("analytic", |b| {
        b.iter(|| pts.iter().map(|q| complex_hessian(&spec, black_box(q), HessianMode::AnalyticRadial).unwrap().det()).sum::<f64>())
    });
    group.bench_function("finite_difference", |b| {
        b.iter(|| pts.iter().map(|q| complex_hessian(&spec, black_box(q), HessianMode::DEFAULT_FD).unwrap().det()).sum::<f64>())
    });
    group.finish();
}

fn newton(c: &mut Criterion) {
    let p = params();
    let opts = SolveOptions { override_gate: true, ..SolveOptions::default() };
    c.bench_function("newton_solve", |b| b.iter(|| newton_solve(black_box(&p), DEFAULT_NODES, &opts).unwrap().1.iterations));
}

fn distances(c: &mut Criterion) {
    let p = params();
    let spec = PotentialSpec::new(PotentialKind::EguchiHanson, p);
    let pts = shell_samples(p.delta(), 2.0, p.t(), 300, 1).unwrap();
    let mut group = c.benchmark_group("gh");
    group.sample_size(10);
    group.bench_function("knn_dijkstra_300", |b| {
        b.iter(|| SampledMetricSpace::from_knn(pts.clone(), 10, &spec, Provenance::Smoothing { delta: p.delta() }).unwrap().diameter())
    });
    group.finish();
}

criterion_group!(benches, hessian, newton, distances);
criterion_main!(benches);
