use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use unigate::approx::{default_base, find_power, ApproxQuery};
use unigate::synth::{approx_rz, approx_vperp, eval_network, EvalMode, Lowering};

fn eval_benches(c: &mut Criterion) {
    let mut group = c.benchmark_group("eval_network");
    for n in [16usize, 256, 4096] {
        let net = approx_rz(1.0, 0.7, n).unwrap();
        group.bench_with_input(BenchmarkId::new("rz_idealized", n), &net, |b, net| {
            b.iter(|| eval_network(black_box(net), EvalMode::Idealized).unwrap())
        });
    }
    let low = Lowering::new(1.0, 16, 1)
        .lower(&approx_vperp(1.0, 0.5, 16).unwrap())
        .unwrap();
    group.bench_function("vperp16_lowered", |b| {
        b.iter(|| eval_network(black_box(&low), EvalMode::Lowered).unwrap())
    });
    group.finish();
}

fn power_benches(c: &mut Criterion) {
    let mut group = c.benchmark_group("find_power");
    group.sample_size(10);
    let base = default_base(1.0);
    for eps in [0.1, 0.025] {
        let q = ApproxQuery::new(base, 2.0, 4.0, eps);
        group.bench_with_input(BenchmarkId::from_parameter(eps), &q, |b, q| {
            b.iter(|| find_power(black_box(q)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, eval_benches, power_benches);
criterion_main!(benches);
