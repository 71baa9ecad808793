use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use weyr_core::harness::random_instance;
use weyr_core::{commutant_basis, build_weyr_matrix, h_pattern, reduce_pair, weyr_decomposition, FieldDescriptor, SegreStructure};

fn structures() -> Vec<(&'static str, SegreStructure)> {
    vec![
        ("3,2,1", SegreStructure::from_lists(&[3, 2, 1], &[1, 1, 1]).unwrap()),
        ("4x2,2x2", SegreStructure::from_lists(&[4, 2], &[2, 2]).unwrap()),
        ("5,4,3,2,1", SegreStructure::from_lists(&[5, 4, 3, 2, 1], &[1, 1, 1, 1, 1]).unwrap()),
    ]
}

fn reduce(c: &mut Criterion) {
    let mut g = c.benchmark_group("reduce_pair");
    g.sample_size(10);
    for (name, j) in structures() {
        let inst = random_instance(&j, FieldDescriptor::Rational, 1);
        g.bench_with_input(BenchmarkId::from_parameter(name), &inst.input, |b, pair| {
            b.iter(|| reduce_pair(black_box(pair)).unwrap())
        });
    }
    g.finish();
}

fn decompose(c: &mut Criterion) {
    let mut g = c.benchmark_group("weyr_decomposition");
    for (name, j) in structures() {
        let inst = random_instance(&j, FieldDescriptor::Rational, 2);
        g.bench_with_input(BenchmarkId::from_parameter(name), inst.input.m(), |b, m| {
            b.iter(|| weyr_decomposition(black_box(m)).unwrap())
        });
    }
    g.finish();
}

fn commutant(c: &mut Criterion) {
    let mut g = c.benchmark_group("commutant_basis");
    for (name, j) in structures() {
        let pattern = h_pattern(&j);
        let w = build_weyr_matrix(pattern.weyr(), FieldDescriptor::Rational);
        g.bench_with_input(BenchmarkId::from_parameter(name), &w, |b, w| {
            b.iter(|| commutant_basis(black_box(w), &pattern).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, reduce, decompose, commutant);
criterion_main!(benches);
