//! Solver scaling benchmarks.
//!
//! The Dyadic CART program touches at most `2^d N` rectangles with d split
//! candidates each, so its run time should grow roughly linearly in the
//! cell count N at fixed d and order; the ORT program visits O(N^2)
//! rectangles with O(nd) candidates. The grouped timings below make both
//! shapes visible in the criterion report.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use ortree_bench::{noisy_smooth, noisy_twopiece};
use ortree_core::solver::opt_value;
use ortree_core::Family;

fn dyadic_cart_scaling(c: &mut Criterion) {
    let mut group = c.benchmark_group("dyadic_cart_rdp");
    for n in [16usize, 32, 64, 128, 256] {
        let y = noisy_twopiece(n, 1);
        group.throughput(Throughput::Elements((n * n) as u64));
        group.bench_with_input(BenchmarkId::new("order0", n * n), &y, |b, y| {
            b.iter(|| opt_value(y, 0, (n as f64).log2(), Family::Rdp).unwrap())
        });
    }
    for n in [16usize, 32, 64] {
        let y = noisy_smooth(n, 2);
        group.throughput(Throughput::Elements((n * n) as u64));
        group.bench_with_input(BenchmarkId::new("order1", n * n), &y, |b, y| {
            b.iter(|| opt_value(y, 1, (n as f64).log2(), Family::Rdp).unwrap())
        });
    }
    group.finish();
}

fn ort_scaling(c: &mut Criterion) {
    let mut group = c.benchmark_group("ort_hier");
    group.sample_size(10);
    for n in [8usize, 16, 24, 32] {
        let y = noisy_smooth(n, 3);
        group.throughput(Throughput::Elements((n * n) as u64));
        group.bench_with_input(BenchmarkId::new("order0", n * n), &y, |b, y| {
            b.iter(|| opt_value(y, 0, (n as f64).log2(), Family::Hier).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, dyadic_cart_scaling, ort_scaling);
criterion_main!(benches);
