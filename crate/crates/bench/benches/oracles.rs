use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tandem_core::simulator::RelayStrategy;
use tandem_core::{optimal_protocol, simulate, BinaryInputChannel, Codeword};

fn bruteforce(c: &mut Criterion) {
    let p = BinaryInputChannel::bsc(0.1).unwrap();
    let q = BinaryInputChannel::bsc(0.2).unwrap();
    let mut group = c.benchmark_group("optimal_protocol");
    group.sample_size(10);
    for n in 2..=3 {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| optimal_protocol(&p, &q, n).unwrap())
        });
    }
    group.finish();
}

fn simulation(c: &mut Criterion) {
    let p = BinaryInputChannel::bsc(0.1).unwrap();
    let q = BinaryInputChannel::bsc(0.2).unwrap();
    let mut group = c.benchmark_group("simulate_100k");
    group.sample_size(10);
    for n in [10, 40] {
        let (x0, x1) = (Codeword::zeros(n), Codeword::ones(n));
        group.bench_with_input(BenchmarkId::new("best_guess", n), &n, |b, &n| {
            b.iter(|| simulate(&p, &q, n, &RelayStrategy::BestGuessSoFar, (&x0, &x1), 100_000, 1).unwrap())
        });
        let forward = RelayStrategy::ForwardQuantized {
            partition: vec![0, 1],
        };
        group.bench_with_input(BenchmarkId::new("forward", n), &n, |b, &n| {
            b.iter(|| simulate(&p, &q, n, &forward, (&x0, &x1), 100_000, 1).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bruteforce, simulation);
criterion_main!(benches);
