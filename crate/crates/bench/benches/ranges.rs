use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use hybridrange::linalg::{c64, eig_hermitian, from_real_diagonal, pauli};
use hybridrange::range::{commuting_find, single_witness};
use hybridrange::search::{multistart, random_frame, restart_rng};
use hybridrange::{HermitianMatrix, HermitianTuple, SearchOptions};

fn random_hermitian(n: usize, seed: u64) -> HermitianMatrix {
    let u = random_frame(n, n, &mut restart_rng(seed, 0)).unwrap();
    let values: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin() * 3.0).collect();
    let m = u.matrix() * from_real_diagonal(&values) * u.matrix().adjoint();
    HermitianMatrix::new((&m + m.adjoint()) * c64(0.5, 0.0)).unwrap()
}

fn xyz(qubits: usize) -> HermitianTuple {
    let ms = [pauli::x(), pauli::y(), pauli::z()]
        .iter()
        .map(|p| HermitianMatrix::new(pauli::tensor_power(p, qubits)).unwrap())
        .collect();
    HermitianTuple::new(ms).unwrap()
}

fn eig(c: &mut Criterion) {
    let mut group = c.benchmark_group("eig_hermitian");
    for n in [8, 32, 64] {
        let a = random_hermitian(n, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| b.iter(|| eig_hermitian(black_box(a))));
    }
    group.finish();
}

fn witness(c: &mut Criterion) {
    let a = random_hermitian(12, 2);
    let s = eig_hermitian(&a).unwrap();
    // upper ends of the box for k = 2, p = 3
    let t = [s.a(2), s.a(4), s.a(6)];
    c.bench_function("single_witness n=12 k=2 p=3", |b| b.iter(|| single_witness(&a, 2, 3, black_box(&t))));
}

fn commuting(c: &mut Criterion) {
    let a = xyz(4);
    c.bench_function("commuting_find xyz4 k=4 p=4", |b| b.iter(|| commuting_find(black_box(&a), 4, 4)));
}

fn search(c: &mut Criterion) {
    let a = HermitianTuple::new(vec![random_hermitian(8, 3), random_hermitian(8, 4)]).unwrap();
    let opts = SearchOptions { restarts: 8, max_iters: 500, ..SearchOptions::default() };
    let mut group = c.benchmark_group("multistart");
    group.sample_size(10);
    group.bench_function("m=2 n=8 k=1 p=2", |b| b.iter(|| multistart(black_box(&a), 1, 2, &opts)));
    group.finish();
}

criterion_group!(benches, eig, witness, commuting, search);
criterion_main!(benches);
