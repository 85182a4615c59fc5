use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use zslab_core::corpus::real_corpus;
use zslab_core::{
    zs_spectrum, Complex64, HillSystem, LinearSystem, Potential, TransferConfig, ZsCurve, ZsSystem,
};

fn monodromy(c: &mut Criterion) {
    let mut group = c.benchmark_group("monodromy");
    for n_modes in [32, 64, 128] {
        let u = real_corpus(1, 1, n_modes).remove(0);
        let zs = ZsSystem::new(&Potential::diagonal(&u));
        let hill = HillSystem::from_miura(&u, TransferConfig::default());
        let lam = Complex64::new(2.5, 0.4);
        group.bench_with_input(BenchmarkId::new("zs", n_modes), &lam, |b, &lam| {
            b.iter(|| zs.monodromy(black_box(lam), false).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("zs_with_jet", n_modes), &lam, |b, &lam| {
            b.iter(|| zs.monodromy(black_box(lam), true).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("hill", n_modes), &lam, |b, &lam| {
            b.iter(|| hill.monodromy(black_box(lam * lam), false).unwrap())
        });
    }
    group.finish();
}

fn spectrum(c: &mut Criterion) {
    let phi = Potential::diagonal(&real_corpus(1, 1, 64).remove(0));
    let mut group = c.benchmark_group("spectrum");
    group.sample_size(10);
    group.bench_function("zs_n_spec_4", |b| b.iter(|| zs_spectrum(black_box(&phi), 4).unwrap()));
    let curve = ZsCurve::zs(&phi, 4, TransferConfig::default()).unwrap();
    group.bench_function("action_n1_k1", |b| b.iter(|| curve.action(black_box(1), 1).unwrap()));
    group.finish();
}

criterion_group!(benches, monodromy, spectrum);
criterion_main!(benches);
