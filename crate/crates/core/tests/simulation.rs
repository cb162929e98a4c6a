mod common;

use rand::Rng;
use tandem_core::bounds::theorem3_bound;
use tandem_core::simulator::{wilson_interval, RelayStrategy};
use tandem_core::{exponent_fit, simulate, BinaryInputChannel, Codeword, Error, SimResult};

fn bsc(p: f64) -> BinaryInputChannel {
    BinaryInputChannel::bsc(p).unwrap()
}

fn repetition(
    p: &BinaryInputChannel,
    q: &BinaryInputChannel,
    n: usize,
    strategy: &RelayStrategy,
    trials: u64,
    seed: u64,
) -> SimResult {
    simulate(p, q, n, strategy, (&Codeword::zeros(n), &Codeword::ones(n)), trials, seed).unwrap()
}

fn forward() -> RelayStrategy {
    RelayStrategy::ForwardQuantized {
        partition: vec![0, 1],
    }
}

#[test]
fn single_use_is_a_coin_flip() {
    let c = bsc(0.2);
    for strategy in [RelayStrategy::BestGuessSoFar, forward()] {
        let r = repetition(&c, &c, 1, &strategy, 100_000, 5);
        let slack = r.ci95[0] + r.ci95[1];
        assert!((r.pe_sum() - 1.0).abs() <= slack, "{r:?}");
    }
}

#[test]
fn errors_decay_with_blocklength() {
    let c = bsc(0.1);
    let short = repetition(&c, &c, 20, &RelayStrategy::BestGuessSoFar, 1_000_000, 6);
    let long = repetition(&c, &c, 40, &RelayStrategy::BestGuessSoFar, 1_000_000, 6);
    assert!(long.pe_sum() < short.pe_sum(), "{} !< {}", long.pe_sum(), short.pe_sum());
}

#[test]
fn result_is_independent_of_thread_count() {
    let (p, q) = (bsc(0.1), bsc(0.25));
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| repetition(&p, &q, 12, &RelayStrategy::BestGuessSoFar, 100_000, 9))
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn wilson_interval_is_calibrated() {
    let rate = 0.01;
    let draws = 2_000u64;
    let mut covered = 0;
    for seed in 0..1000 {
        let mut rng = common::rng(seed);
        let errors = (0..draws).filter(|_| rng.gen_bool(rate)).count() as u64;
        let (lo, hi) = wilson_interval(errors, draws);
        if lo <= rate && rate <= hi {
            covered += 1;
        }
    }
    assert!(covered >= 930, "coverage {covered}/1000");
}

#[test]
fn simulated_runs_respect_the_converse() {
    let z = BinaryInputChannel::z_channel(0.5).unwrap();
    let pairs = [(bsc(0.1), bsc(0.2)), (bsc(0.2), z.clone()), (z, bsc(0.05))];
    for (p, q) in &pairs {
        for n in [2, 6, 12] {
            for strategy in [RelayStrategy::BestGuessSoFar, forward()] {
                let r = repetition(p, q, n, &strategy, 50_000, 10);
                let upper = r.pe_sum() + r.ci95[0] + r.ci95[1];
                let bound = theorem3_bound(n, p, q).unwrap();
                assert!(-upper.ln() <= bound, "{r:?} bound {bound}");
            }
        }
    }
}

#[test]
fn erasure_hop_runs() {
    let p = BinaryInputChannel::bec(0.3).unwrap();
    let q = bsc(0.1);
    let strategy = RelayStrategy::ForwardQuantized {
        partition: vec![0, 1, 0],
    };
    let r = repetition(&p, &q, 8, &strategy, 20_000, 3);
    assert!(r.pe_sum() < 1.0);
    let best = repetition(&p, &q, 8, &RelayStrategy::BestGuessSoFar, 20_000, 3);
    assert!(best.pe_sum() < 1.0);
}

#[test]
fn fit_refuses_runs_without_errors() {
    let c = bsc(0.01);
    let runs: Vec<SimResult> = [5, 10, 20, 40]
        .iter()
        .map(|&n| repetition(&c, &c, n, &RelayStrategy::BestGuessSoFar, 1_000, 1))
        .collect();
    assert!(matches!(exponent_fit(&runs), Err(Error::ZeroErrorCount(_))));
}

#[test]
fn result_serializes_as_one_json_line() {
    let c = bsc(0.2);
    let r = repetition(&c, &c, 4, &forward(), 1_000, 2);
    let line = serde_json::to_string(&r).unwrap();
    assert!(!line.contains('\n'));
    let back: SimResult = serde_json::from_str(&line).unwrap();
    assert_eq!(back, r);
}
