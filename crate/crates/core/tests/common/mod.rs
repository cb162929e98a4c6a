#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tandem_core::bounds::{dmc_pair_bounds, pairwise_test_bounds};
use tandem_core::{BinaryInputChannel, Codeword};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random binary-input channel with `m` outputs. About one entry in six is
/// zeroed, keeping at least one shared output so the supports overlap.
pub fn random_channel(rng: &mut impl Rng, m: usize) -> BinaryInputChannel {
    loop {
        let mut rows = [vec![0.0; m], vec![0.0; m]];
        for row in rows.iter_mut() {
            for v in row.iter_mut() {
                *v = if rng.gen_bool(1.0 / 6.0) { 0.0 } else { rng.gen_range(0.02..1.0) };
            }
        }
        let shared = (0..m).any(|y| rows[0][y] > 0.0 && rows[1][y] > 0.0);
        if !shared {
            continue;
        }
        let [r0, r1] = rows.map(|r| {
            let t: f64 = r.iter().sum();
            r.into_iter().map(|v| v / t).collect::<Vec<_>>()
        });
        return BinaryInputChannel::from_rows(r0, r1).unwrap();
    }
}

pub fn random_sized_channel(rng: &mut impl Rng) -> BinaryInputChannel {
    let m = rng.gen_range(2..=4);
    random_channel(rng, m)
}

/// `{0.05, 0.10, ..., 0.95}`.
pub fn open_grid() -> Vec<f64> {
    (1..=19).map(|k| k as f64 * 0.05).collect()
}

/// `{0, 0.05, 0.10, ..., 0.95, 1}`.
pub fn closed_grid() -> Vec<f64> {
    let mut g = vec![0.0];
    g.extend(open_grid());
    g.push(1.0);
    g
}

/// `{0.1, 0.2, ..., 0.9}`.
pub fn nine_grid() -> Vec<f64> {
    (1..=9).map(|k| k as f64 * 0.1).collect()
}

/// `Q^n(z | w)` for every `z`, indexed big-endian in base `|Z|`.
pub fn output_law(w: &Codeword, q: &BinaryInputChannel) -> Vec<f64> {
    let m = q.outputs();
    let mut law = vec![1.0];
    for &b in w.bits() {
        law = law
            .iter()
            .flat_map(|&prefix| q.row(b).iter().map(move |&v| prefix * v))
            .collect();
    }
    debug_assert_eq!(law.len(), m.pow(w.len() as u32));
    law
}

/// Error pair of the decoder that says Θ = 1 exactly on the outputs whose
/// bit is set in `partition`.
pub fn partition_errors(law0: &[f64], law1: &[f64], partition: u64) -> (f64, f64) {
    let mut pe0 = 0.0;
    let mut pe1 = 0.0;
    for z in 0..law0.len() {
        if partition >> z & 1 == 1 {
            pe0 += law0[z];
        } else {
            pe1 += law1[z];
        }
    }
    (pe0, pe1)
}

pub fn map_error_sum(law0: &[f64], law1: &[f64]) -> f64 {
    law0.iter().zip(law1).map(|(a, b)| a.min(*b)).sum()
}

#[derive(Debug, Default)]
pub struct ExhaustiveTally {
    pub cases: u64,
    pub counterexamples: Vec<String>,
}

/// Checks both disjunctions for every codeword pair of length `n`, every
/// decoder partition of `Z^n` and every `s` in `grid`: the codeword-pair
/// form at all grid points and the exact-curvature form at interior ones.
pub fn exhaustive_disjunction(q: &BinaryInputChannel, n: usize, grid: &[f64]) -> ExhaustiveTally {
    let mut tally = ExhaustiveTally::default();
    let outputs = q.outputs().pow(n as u32);
    let partitions = 1u64 << outputs;
    for a in 0..1u64 << n {
        for b in 0..1u64 << n {
            let (w0, w1) = (Codeword::from_index(a, n), Codeword::from_index(b, n));
            let (l0, l1) = (output_law(&w0, q), output_law(&w1, q));
            let mut bounds: Vec<_> = grid
                .iter()
                .map(|&s| dmc_pair_bounds(&w0, &w1, q, s).unwrap())
                .collect();
            bounds.extend(
                grid.iter()
                    .filter(|&&s| s > 0.0 && s < 1.0)
                    .map(|&s| pairwise_test_bounds(&l0, &l1, s).unwrap()),
            );
            for part in 0..partitions {
                let (pe0, pe1) = partition_errors(&l0, &l1, part);
                for bound in &bounds {
                    tally.cases += 1;
                    if !bound.holds(pe0, pe1) {
                        tally
                            .counterexamples
                            .push(format!("{w0}/{w1} part {part:#x} s {}", bound.s));
                    }
                }
            }
        }
    }
    tally
}

/// Checks the max-over-s bound against every decoder partition for every
/// codeword pair of length `n`.
pub fn exhaustive_corollary(q: &BinaryInputChannel, n: usize) -> ExhaustiveTally {
    let mut tally = ExhaustiveTally::default();
    let outputs = q.outputs().pow(n as u32);
    for a in 0..1u64 << n {
        for b in 0..1u64 << n {
            let (w0, w1) = (Codeword::from_index(a, n), Codeword::from_index(b, n));
            let (l0, l1) = (output_law(&w0, q), output_law(&w1, q));
            let rhs = tandem_core::corollary1_bound(&w0, &w1, q).unwrap();
            for part in 0..1u64 << outputs {
                let (pe0, pe1) = partition_errors(&l0, &l1, part);
                tally.cases += 1;
                if -(pe0 + pe1).ln() > rhs {
                    tally
                        .counterexamples
                        .push(format!("{w0}/{w1} part {part:#x}"));
                }
            }
            tally.cases += 1;
            if -map_error_sum(&l0, &l1).ln() > rhs {
                tally.counterexamples.push(format!("{w0}/{w1} MAP"));
            }
        }
    }
    tally
}
