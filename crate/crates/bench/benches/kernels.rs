use std::hint::black_box;

use charlab_core::charsum::max_partial_sums_all;
use charlab_core::lfunc::log_K;
use charlab_core::{build_group, enumerate_characters, sieve_primes, CharacterFilter};
use criterion::{criterion_group, criterion_main, Criterion};

fn sieve(c: &mut Criterion) {
    c.bench_function("sieve 1e6", |b| {
        b.iter(|| sieve_primes(black_box(1_000_000)))
    });
}

fn msum_scan(c: &mut Criterion) {
    let table = sieve_primes(20_000).unwrap();
    let mut g = c.benchmark_group("max partial sums, all characters");
    for q in [2310u64, 10_007] {
        let group = build_group(q, &table).unwrap();
        g.bench_function(format!("q = {q}"), |b| {
            b.iter(|| max_partial_sums_all(black_box(&group)))
        });
    }
    g.finish();
}

fn euler_product(c: &mut Criterion) {
    let table = sieve_primes(1_000_000).unwrap();
    let group = build_group(101, &table).unwrap();
    let xi = enumerate_characters(&group, CharacterFilter::non_principal())
        .next()
        .unwrap();
    c.bench_function("log K, X = 1e6", |b| {
        b.iter(|| log_K(black_box(&xi), 1e6, &table))
    });
}

criterion_group!(benches, sieve, msum_scan, euler_product);
criterion_main!(benches);
