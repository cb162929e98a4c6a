//! Monte Carlo simulation of baseline relay strategies.
//!
//! At time `i` the encoder sends `x_i` over `P` while the relay sends `w_i`
//! over `Q`, where `w_i` may depend only on `y_1..y_{i-1}`; `w_1 = 0`.
//!
//! Both strategies are finite state machines over the received prefix, so
//! the decoder computes the exact likelihood `P(z_1..z_n | Θ)` by a forward
//! recursion over relay states and decides by MAP (ties to Θ = 0).
//!
//! Randomness is counter based: trial `t` draws from the ChaCha8 stream
//! number `t` of the run's seed, so results do not depend on how trials are
//! split across threads.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{BinaryInputChannel, Codeword};
use crate::error::{Error, Result};

pub const MAX_BLOCKLENGTH: usize = 10_000;
pub const MAX_TRIALS: u64 = 1_000_000_000;
/// Runs with fewer total errors than this are excluded from fits.
pub const RELIABLE_ERRORS: u64 = 20;
/// Upper bound on relay states in any one layer.
pub const MAX_LAYER_STATES: usize = 1 << 20;

const Z_95: f64 = 1.959_963_984_540_054;
const CHUNK: u64 = 1 << 14;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum RelayStrategy {
    /// Send `partition[y]` for the symbol received one step earlier.
    ForwardQuantized { partition: Vec<u8> },
    /// Send the relay's current MAP estimate of Θ from `y_1..y_i`.
    BestGuessSoFar,
}

/// Relay behaviour unrolled over time: layer `i` holds the states the relay
/// can be in before sending `w_{i+1}`.
#[derive(Clone, Debug)]
pub struct RelayMachine {
    m: usize,
    /// `bits[i][s]`: bit sent from state `s` of layer `i`.
    bits: Vec<Vec<u8>>,
    /// `next[i][s * m + y]`: state in layer `i + 1` after receiving `y`.
    next: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum GuessState {
    /// Net symbol counts: positions with `(x0, x1) = (0, 1)` count up,
    /// `(1, 0)` count down.
    Counts(Vec<i32>),
    /// A symbol impossible under one hypothesis was seen.
    Certain(u8),
}

impl RelayMachine {
    pub fn build(
        strategy: &RelayStrategy,
        p: &BinaryInputChannel,
        x0: &Codeword,
        x1: &Codeword,
    ) -> Result<Self> {
        match strategy {
            RelayStrategy::ForwardQuantized { partition } => {
                Self::forward(partition, p.outputs(), x0.len())
            }
            RelayStrategy::BestGuessSoFar => Self::best_guess(p, x0, x1),
        }
    }

    fn forward(partition: &[u8], m: usize, n: usize) -> Result<Self> {
        if partition.len() != m {
            return Err(Error::AlphabetMismatch(partition.len(), m));
        }
        if partition.iter().any(|&b| b > 1) {
            return Err(Error::InvalidBits(format!("{partition:?}")));
        }
        if partition.iter().all(|&b| b == partition[0]) {
            return Err(Error::DegenerateStrategy("forward partition is constant"));
        }
        let mut bits = vec![vec![0u8]];
        let mut next = Vec::new();
        for i in 0..n.saturating_sub(1) {
            let width = bits[i].len();
            next.push(
                (0..width)
                    .flat_map(|_| partition.iter().map(|&b| u32::from(b)))
                    .collect(),
            );
            bits.push(vec![0, 1]);
        }
        Ok(Self { m, bits, next })
    }

    fn best_guess(p: &BinaryInputChannel, x0: &Codeword, x1: &Codeword) -> Result<Self> {
        let m = p.outputs();
        let n = x0.len();
        let llr: Vec<f64> = (0..m)
            .map(|y| p.row(1)[y].ln() - p.row(0)[y].ln())
            .collect();
        let guess = |state: &GuessState| -> u8 {
            match state {
                GuessState::Certain(b) => *b,
                GuessState::Counts(d) => {
                    let total: f64 = d
                        .iter()
                        .zip(&llr)
                        .filter(|(&c, _)| c != 0)
                        .map(|(&c, l)| f64::from(c) * l)
                        .sum();
                    u8::from(total > 1e-9)
                }
            }
        };
        // The symbol y at a position of type (a, b) = (x0_i, x1_i).
        let step = |state: &GuessState, a: u8, b: u8, y: usize| -> GuessState {
            let GuessState::Counts(d) = state else {
                return state.clone();
            };
            if a == b {
                return state.clone();
            }
            let (under0, under1) = (p.row(a)[y], p.row(b)[y]);
            match (under0 > 0.0, under1 > 0.0) {
                (true, true) => {
                    let mut d = d.clone();
                    d[y] += if a == 0 { 1 } else { -1 };
                    GuessState::Counts(d)
                }
                (false, true) => GuessState::Certain(1),
                (true, false) => GuessState::Certain(0),
                // unreachable under either hypothesis
                (false, false) => state.clone(),
            }
        };

        let mut layer = vec![GuessState::Counts(vec![0; m])];
        let mut bits = vec![vec![guess(&layer[0])]];
        let mut next = Vec::new();
        for i in 0..n.saturating_sub(1) {
            let (a, b) = (x0.bits()[i], x1.bits()[i]);
            let mut index: HashMap<GuessState, u32> = HashMap::new();
            let mut following = Vec::new();
            let mut links = Vec::with_capacity(layer.len() * m);
            for state in &layer {
                for y in 0..m {
                    let s = step(state, a, b, y);
                    let id = *index.entry(s.clone()).or_insert_with(|| {
                        following.push(s);
                        (following.len() - 1) as u32
                    });
                    links.push(id);
                }
            }
            if following.len() > MAX_LAYER_STATES {
                return Err(Error::CapExceeded {
                    what: "relay states per layer",
                    limit: MAX_LAYER_STATES as u128,
                    requested: following.len() as u128,
                });
            }
            next.push(links);
            bits.push(following.iter().map(guess).collect());
            layer = following;
        }
        Ok(Self { m, bits, next })
    }

    pub fn n(&self) -> usize {
        self.bits.len()
    }

    /// Largest number of states in any layer.
    pub fn width(&self) -> usize {
        self.bits.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Everything a trial needs, shared read-only across threads.
struct Simulation<'a> {
    machine: RelayMachine,
    p: &'a BinaryInputChannel,
    q: &'a BinaryInputChannel,
    x: [&'a Codeword; 2],
    p_cdf: [Vec<f64>; 2],
    q_cdf: [Vec<f64>; 2],
}

fn cdf(row: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    row.iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect()
}

fn sample(cdf: &[f64], u: f64) -> usize {
    cdf.iter().position(|&c| u < c).unwrap_or_else(|| {
        let total = cdf[cdf.len() - 1];
        cdf.iter().position(|&c| c == total).unwrap_or(0)
    })
}

struct Buffers {
    alpha: Vec<[f64; 2]>,
    next: Vec<[f64; 2]>,
    z: Vec<usize>,
}

impl Buffers {
    fn new(width: usize, n: usize) -> Self {
        Self {
            alpha: Vec::with_capacity(width),
            next: Vec::with_capacity(width),
            z: Vec::with_capacity(n),
        }
    }
}

impl Simulation<'_> {
    /// Runs one trial under hypothesis `theta`; returns whether the decoder
    /// erred.
    fn trial(&self, theta: u8, rng: &mut ChaCha8Rng, buf: &mut Buffers) -> bool {
        let n = self.machine.n();
        let x = self.x[usize::from(theta)].bits();
        buf.z.clear();
        let mut state = 0usize;
        for (i, &xi) in x.iter().enumerate() {
            let w = self.machine.bits[i][state];
            buf.z.push(sample(&self.q_cdf[usize::from(w)], rng.gen()));
            if i + 1 < n {
                let y = sample(&self.p_cdf[usize::from(xi)], rng.gen());
                state = self.machine.next[i][state * self.machine.m + y] as usize;
            }
        }
        let [l0, l1] = self.log_likelihoods(buf);
        let decide = u8::from(l1 > l0);
        decide != theta
    }

    /// `ln P(z | Θ = 0)` and `ln P(z | Θ = 1)` by a joint forward
    /// recursion over relay states.
    fn log_likelihoods(&self, buf: &mut Buffers) -> [f64; 2] {
        let n = self.machine.n();
        let m = self.machine.m;
        let (x0, x1) = (self.x[0].bits(), self.x[1].bits());
        let Buffers { alpha, next, z } = buf;
        alpha.clear();
        alpha.push([1.0, 1.0]);
        let mut log_scale = [0.0; 2];
        for i in 0..n {
            let qz = [self.q.row(0)[z[i]], self.q.row(1)[z[i]]];
            let bits = &self.machine.bits[i];
            if i + 1 == n {
                for (a, &w) in alpha.iter_mut().zip(bits) {
                    let f = qz[usize::from(w)];
                    a[0] *= f;
                    a[1] *= f;
                }
                break;
            }
            let (r0, r1) = (self.p.row(x0[i]), self.p.row(x1[i]));
            next.clear();
            next.resize(self.machine.bits[i + 1].len(), [0.0; 2]);
            let links = self.machine.next[i].chunks_exact(m);
            for ((a, &w), out) in alpha.iter().zip(bits).zip(links) {
                let f = qz[usize::from(w)];
                let (a0, a1) = (a[0] * f, a[1] * f);
                for ((&t, &p0), &p1) in out.iter().zip(r0).zip(r1) {
                    let cell = &mut next[t as usize];
                    cell[0] += a0 * p0;
                    cell[1] += a1 * p1;
                }
            }
            std::mem::swap(alpha, next);
            if i % 4 == 3 {
                rescale(alpha, &mut log_scale);
            }
        }
        rescale(alpha, &mut log_scale);
        log_scale
    }
}

/// Divides each hypothesis column by its total and accumulates the log of
/// that total; a column that has died out becomes negative infinity.
fn rescale(alpha: &mut [[f64; 2]], log_scale: &mut [f64; 2]) {
    for h in 0..2 {
        let total: f64 = alpha.iter().map(|a| a[h]).sum();
        if total > 0.0 {
            alpha.iter_mut().for_each(|a| a[h] /= total);
            log_scale[h] += total.ln();
        } else {
            log_scale[h] = f64::NEG_INFINITY;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub n: usize,
    pub trials: u64,
    pub trials0: u64,
    pub trials1: u64,
    pub errors0: u64,
    pub errors1: u64,
    pub pe0_hat: f64,
    pub pe1_hat: f64,
    /// Wilson 95% half-widths for `pe0_hat` and `pe1_hat`.
    pub ci95: [f64; 2],
    pub seed: u64,
    pub strategy: RelayStrategy,
    pub x0: Codeword,
    pub x1: Codeword,
    /// Fewer than [`RELIABLE_ERRORS`] errors were observed.
    pub unreliable: bool,
}

impl SimResult {
    pub fn pe_sum(&self) -> f64 {
        self.pe0_hat + self.pe1_hat
    }
}

/// Wilson score interval for `errors` successes out of `trials` at 95%.
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let t = trials as f64;
    let p = errors as f64 / t;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / t;
    let center = (p + z2 / (2.0 * t)) / denom;
    let half = Z_95 / denom * (p * (1.0 - p) / t + z2 / (4.0 * t * t)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

fn half_width(errors: u64, trials: u64) -> f64 {
    let (lo, hi) = wilson_interval(errors, trials);
    0.5 * (hi - lo)
}

/// Simulates `trials` transmissions, split evenly between Θ = 0 and Θ = 1
/// (Θ = 0 gets the extra trial when the count is odd).
#[allow(clippy::too_many_arguments)]
pub fn simulate(
    p: &BinaryInputChannel,
    q: &BinaryInputChannel,
    n: usize,
    strategy: &RelayStrategy,
    encoder: (&Codeword, &Codeword),
    trials: u64,
    seed: u64,
) -> Result<SimResult> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
            range: "n >= 1",
        });
    }
    if n > MAX_BLOCKLENGTH {
        return Err(Error::CapExceeded {
            what: "blocklength",
            limit: MAX_BLOCKLENGTH as u128,
            requested: n as u128,
        });
    }
    if trials > MAX_TRIALS {
        return Err(Error::CapExceeded {
            what: "trials",
            limit: MAX_TRIALS as u128,
            requested: u128::from(trials),
        });
    }
    if trials < 2 {
        return Err(Error::InvalidParameter {
            name: "trials",
            value: trials as f64,
            range: "trials >= 2",
        });
    }
    let (x0, x1) = encoder;
    if x0.len() != n || x1.len() != n {
        return Err(Error::LengthMismatch(x0.len().max(x1.len()), n));
    }
    let sim = Simulation {
        machine: RelayMachine::build(strategy, p, x0, x1)?,
        p,
        q,
        x: [x0, x1],
        p_cdf: [cdf(p.row(0)), cdf(p.row(1))],
        q_cdf: [cdf(q.row(0)), cdf(q.row(1))],
    };
    let base = ChaCha8Rng::seed_from_u64(seed);
    let width = sim.machine.width();

    let chunks = trials.div_ceil(CHUNK);
    let counts: Vec<[u64; 2]> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut buf = Buffers::new(width, n);
            let mut errors = [0u64; 2];
            for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                let theta = (t % 2) as u8;
                let mut rng = base.clone();
                rng.set_stream(t);
                if sim.trial(theta, &mut rng, &mut buf) {
                    errors[usize::from(theta)] += 1;
                }
            }
            errors
        })
        .collect();
    let errors0: u64 = counts.iter().map(|c| c[0]).sum();
    let errors1: u64 = counts.iter().map(|c| c[1]).sum();
    let trials0 = trials - trials / 2;
    let trials1 = trials / 2;
    Ok(SimResult {
        n,
        trials,
        trials0,
        trials1,
        errors0,
        errors1,
        pe0_hat: errors0 as f64 / trials0 as f64,
        pe1_hat: errors1 as f64 / trials1 as f64,
        ci95: [half_width(errors0, trials0), half_width(errors1, trials1)],
        seed,
        strategy: strategy.clone(),
        x0: x0.clone(),
        x1: x1.clone(),
        unreliable: errors0 + errors1 < RELIABLE_ERRORS,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Least-squares line through `(n, -ln pe)`.
pub fn fit_log_decay(points: &[(f64, f64)]) -> Result<ExponentFit> {
    let k = points.len();
    if k < 3 {
        return Err(Error::InsufficientPoints { needed: 3, got: k });
    }
    let ys: Vec<(f64, f64)> = points.iter().map(|&(n, pe)| (n, -pe.ln())).collect();
    let kf = k as f64;
    let mean_x = ys.iter().map(|p| p.0).sum::<f64>() / kf;
    let mean_y = ys.iter().map(|p| p.1).sum::<f64>() / kf;
    let sxx: f64 = ys.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = ys.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientPoints { needed: 2, got: 1 });
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ssr: f64 = ys
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let stderr = (ssr / (kf - 2.0) / sxx).sqrt();
    Ok(ExponentFit {
        slope,
        stderr,
        intercept,
        points: k,
    })
}

/// Fits the decay rate of `pe0_hat + pe1_hat` against `n`, skipping
/// unreliable runs. Needs four distinct blocklengths.
pub fn exponent_fit(results: &[SimResult]) -> Result<ExponentFit> {
    if let Some(r) = results.iter().find(|r| r.errors0 + r.errors1 == 0) {
        return Err(Error::ZeroErrorCount(r.n));
    }
    let usable: Vec<&SimResult> = results.iter().filter(|r| !r.unreliable).collect();
    let mut distinct: Vec<usize> = usable.iter().map(|r| r.n).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 4 {
        return Err(Error::InsufficientPoints {
            needed: 4,
            got: distinct.len(),
        });
    }
    let points: Vec<(f64, f64)> = usable.iter().map(|r| (r.n as f64, r.pe_sum())).collect();
    fit_log_decay(&points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bsc(p: f64) -> BinaryInputChannel {
        BinaryInputChannel::bsc(p).unwrap()
    }

    #[test]
    fn forward_machine_shape() {
        let m = RelayMachine::forward(&[0, 1], 2, 4).unwrap();
        assert_eq!(m.n(), 4);
        assert_eq!(m.bits[0], vec![0]);
        assert_eq!(m.next[0], vec![0, 1]);
        assert_eq!(m.next[1], vec![0, 1, 0, 1]);
        assert!(matches!(
            RelayMachine::forward(&[1, 1], 2, 4),
            Err(Error::DegenerateStrategy(_))
        ));
    }

    #[test]
    fn best_guess_states_on_repetition_code() {
        let c = bsc(0.1);
        let m = RelayMachine::best_guess(&c, &Codeword::zeros(6), &Codeword::ones(6)).unwrap();
        // net count difference takes i + 1 values after i symbols
        for (i, layer) in m.bits.iter().enumerate() {
            assert_eq!(layer.len(), i + 1);
        }
    }

    #[test]
    fn best_guess_goes_certain_on_impossible_symbol() {
        let z = BinaryInputChannel::z_channel(0.5).unwrap();
        let m = RelayMachine::best_guess(&z, &Codeword::zeros(3), &Codeword::ones(3)).unwrap();
        // y = 1 is impossible under x = 0, so the relay locks onto 1
        let s = m.next[0][1] as usize;
        assert_eq!(m.bits[1][s], 1);
        let s2 = m.next[1][s * 2] as usize;
        assert_eq!(m.bits[2][s2], 1);
    }

    #[test]
    fn forward_recursion_matches_enumeration() {
        // brute-force P(z | Θ) over all y for a small instance
        let p = bsc(0.15);
        let q = BinaryInputChannel::z_channel(0.3).unwrap();
        let x0: Codeword = "0110".parse().unwrap();
        let x1: Codeword = "1011".parse().unwrap();
        let strategy = RelayStrategy::BestGuessSoFar;
        let machine = RelayMachine::build(&strategy, &p, &x0, &x1).unwrap();
        let sim = Simulation {
            machine: machine.clone(),
            p: &p,
            q: &q,
            x: [&x0, &x1],
            p_cdf: [cdf(p.row(0)), cdf(p.row(1))],
            q_cdf: [cdf(q.row(0)), cdf(q.row(1))],
        };
        let mut buf = Buffers::new(0, 0);
        let n = 4;
        for zi in 0..16usize {
            buf.z = (0..n).map(|i| (zi >> (n - 1 - i)) & 1).collect();
            let ll = sim.log_likelihoods(&mut buf);
            for h in 0..2u8 {
                let x = [&x0, &x1][usize::from(h)].bits();
                let mut total = 0.0;
                for yi in 0..8usize {
                    let ys: Vec<usize> = (0..3).map(|i| (yi >> (2 - i)) & 1).collect();
                    let mut state = 0usize;
                    let mut prob = 1.0;
                    for i in 0..n {
                        let w = machine.bits[i][state];
                        prob *= q.row(w)[buf.z[i]];
                        if i + 1 < n {
                            prob *= p.row(x[i])[ys[i]];
                            state = machine.next[i][state * 2 + ys[i]] as usize;
                        }
                    }
                    total += prob;
                }
                let ll = ll[usize::from(h)];
                if total == 0.0 {
                    assert_eq!(ll, f64::NEG_INFINITY, "z {zi} h {h}");
                } else {
                    assert!((ll - total.ln()).abs() < 1e-12, "z {zi} h {h}");
                }
            }
        }
    }

    #[test]
    fn simulation_is_reproducible() {
        let c = bsc(0.1);
        let x0 = Codeword::zeros(10);
        let x1 = Codeword::ones(10);
        let s = RelayStrategy::BestGuessSoFar;
        let a = simulate(&c, &c, 10, &s, (&x0, &x1), 20_000, 7).unwrap();
        let b = simulate(&c, &c, 10, &s, (&x0, &x1), 20_000, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn one_step_has_no_information() {
        let c = bsc(0.1);
        let x0 = Codeword::zeros(1);
        let x1 = Codeword::ones(1);
        for s in [
            RelayStrategy::BestGuessSoFar,
            RelayStrategy::ForwardQuantized {
                partition: vec![0, 1],
            },
        ] {
            let r = simulate(&c, &c, 1, &s, (&x0, &x1), 10_000, 3).unwrap();
            assert_eq!(r.pe_sum(), 1.0);
        }
    }

    #[test]
    fn simulate_rejects_bad_configs() {
        let c = bsc(0.1);
        let x = Codeword::zeros(5);
        let s = RelayStrategy::BestGuessSoFar;
        assert!(matches!(
            simulate(&c, &c, 0, &s, (&x, &x), 10, 1),
            Err(Error::InvalidParameter { name: "n", .. })
        ));
        assert!(matches!(
            simulate(&c, &c, 5, &s, (&x, &x), MAX_TRIALS + 1, 1),
            Err(Error::CapExceeded { .. })
        ));
        assert!(matches!(
            simulate(&c, &c, 4, &s, (&x, &x), 10, 1),
            Err(Error::LengthMismatch(..))
        ));
        let constant = RelayStrategy::ForwardQuantized {
            partition: vec![0, 0],
        };
        assert!(matches!(
            simulate(&c, &c, 5, &constant, (&x, &x), 10, 1),
            Err(Error::DegenerateStrategy(_))
        ));
    }

    #[test]
    fn synthetic_exponential_fit_is_exact() {
        let points: Vec<(f64, f64)> = [10.0f64, 20.0, 30.0, 40.0]
            .iter()
            .map(|&n| (n, (-0.2 * n).exp()))
            .collect();
        let fit = fit_log_decay(&points).unwrap();
        assert!((fit.slope - 0.2).abs() < 1e-12);
        assert!(fit.stderr < 1e-12);
    }

    #[test]
    fn fit_requires_usable_runs() {
        let c = bsc(0.1);
        let x0 = Codeword::zeros(2);
        let x1 = Codeword::ones(2);
        let r = simulate(&c, &c, 2, &RelayStrategy::BestGuessSoFar, (&x0, &x1), 1000, 1).unwrap();
        assert!(matches!(
            exponent_fit(&[r.clone(), r]),
            Err(Error::InsufficientPoints { needed: 4, .. })
        ));
        let mut zero = simulate(&c, &c, 2, &RelayStrategy::BestGuessSoFar, (&x0, &x1), 10, 1).unwrap();
        zero.errors0 = 0;
        zero.errors1 = 0;
        assert_eq!(exponent_fit(&[zero]), Err(Error::ZeroErrorCount(2)));
    }

    #[test]
    fn wilson_interval_contains_estimate() {
        let (lo, hi) = wilson_interval(10, 1000);
        assert!(lo < 0.01 && 0.01 < hi);
        let (lo, hi) = wilson_interval(0, 100);
        assert!(lo < 1e-15);
        assert!(hi > 0.01);
    }
}
