use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use tandem_core::chernoff::d_c;
use tandem_core::exponent::{one_hop_exponent, two_hop_exponent};
use tandem_core::BinaryInputChannel;

fn pairs() -> Vec<(&'static str, BinaryInputChannel, BinaryInputChannel)> {
    let bsc = |p| BinaryInputChannel::bsc(p).unwrap();
    let z = |q| BinaryInputChannel::z_channel(q).unwrap();
    vec![
        ("bsc_bsc", bsc(0.1), bsc(0.2)),
        ("bsc_z", bsc(0.1), z(0.5)),
        ("z_z", z(0.2), z(0.7)),
        ("bec_bsc", BinaryInputChannel::bec(0.3).unwrap(), bsc(0.05)),
    ]
}

fn chernoff(c: &mut Criterion) {
    let p0 = [0.5, 0.2, 0.2, 0.1];
    let p1 = [0.1, 0.2, 0.3, 0.4];
    c.bench_function("d_c/4_outputs", |b| {
        b.iter(|| d_c(black_box(&p0), black_box(&p1), black_box(0.37)).unwrap())
    });
}

fn exponents(c: &mut Criterion) {
    let mut group = c.benchmark_group("two_hop_exponent");
    for (name, p, q) in pairs() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &(p, q), |b, (p, q)| {
            b.iter(|| two_hop_exponent(p, q).unwrap())
        });
    }
    group.finish();

    let z = BinaryInputChannel::z_channel(0.4).unwrap();
    c.bench_function("one_hop_exponent/z", |b| b.iter(|| one_hop_exponent(black_box(&z))));
}

criterion_group!(benches, chernoff, exponents);
criterion_main!(benches);
