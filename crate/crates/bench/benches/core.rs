use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use sineq_core::bodies::{Body, ReinhardtBody, UnconditionalBody};
use sineq_core::entropy::{check_lemma_1d, StepFunction, TailMeasure1D};
use sineq_core::integrate::mc_measure;
use sineq_core::moments::{moment_ratio, parse_norm};
use sineq_core::special::{gamma, gauss_laguerre, ln_gamma};
use sineq_core::Engine;

fn bench_mc_measure(c: &mut Criterion) {
    let mut group = c.benchmark_group("mc_measure");
    group.sample_size(10);
    let polydisc: Body = ReinhardtBody::polydisc(vec![1.0, 1.5, 2.0]).unwrap().into();
    let lp: Body = UnconditionalBody::weighted_lp(3.0, vec![1.0; 3], 2.0).unwrap().into();
    for (name, body) in [("polydisc3", polydisc), ("lp3", lp)] {
        let measure = body.natural_measure();
        group.bench_with_input(BenchmarkId::new(name, 100_000), &body, |b, body| {
            b.iter(|| mc_measure(body, measure, 100_000, 42).unwrap())
        });
    }
    group.finish();
}

fn bench_gamma(c: &mut Criterion) {
    c.bench_function("gamma", |b| b.iter(|| gamma(black_box(7.3))));
    c.bench_function("ln_gamma", |b| b.iter(|| ln_gamma(black_box(27.9))));
}

fn bench_gauss_laguerre(c: &mut Criterion) {
    let mut group = c.benchmark_group("gauss_laguerre");
    for order in [8, 32, 64] {
        group.bench_with_input(BenchmarkId::from_parameter(order), &order, |b, &order| {
            b.iter(|| gauss_laguerre(order))
        });
    }
    group.finish();
}

fn bench_lemma_1d(c: &mut Criterion) {
    let f = StepFunction::new(vec![0.5, 1.0, 2.0, 3.0], vec![0.1, 0.4, 0.5, 2.0, 3.0]).unwrap();
    for (name, mu) in [("exp", TailMeasure1D::Exponential1d), ("radial", TailMeasure1D::RadialMu)] {
        c.bench_function(&format!("lemma_1d/{name}"), |b| b.iter(|| check_lemma_1d(black_box(&f), &mu)));
    }
}

fn bench_moment_ratio(c: &mut Criterion) {
    let mut group = c.benchmark_group("moment_ratio");
    group.sample_size(10);
    let norm = parse_norm("linf", 3).unwrap();
    let engine = Engine::MonteCarlo { samples: 100_000, seed: 42 };
    group.bench_function("linf3", |b| b.iter(|| moment_ratio(&norm, 2.0, 1.0, 3, engine).unwrap()));
    group.finish();
}

criterion_group!(
    benches,
    bench_mc_measure,
    bench_gamma,
    bench_gauss_laguerre,
    bench_lemma_1d,
    bench_moment_ratio
);
criterion_main!(benches);
