//! Exact optimal protocols at tiny blocklengths.
//!
//! A deterministic protocol is a codeword pair `(x0, x1)` plus a relay map
//! that sends `w_1` up front and `w_{k+1}` after seeing `y_1..y_k`. For a
//! fixed protocol the law of the decoder's observation `z_1..z_n` under each
//! hypothesis is a finite sum, so the MAP decoder and its error are exact.
//! Enumerating every protocol then gives the optimal error for that `n`.
//!
//! Enumeration order is codeword pairs (lexicographic, `x0` major) outside
//! and relay maps (binary counter over the prefix-indexed bit vector)
//! inside. The first protocol attaining the minimum wins.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, One, Zero};
use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::bounds::theorem3_bound;
use crate::channel::{joint_p_min, BinaryInputChannel, Codeword};
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// Sums closer than this are treated as tied during the search.
pub const TIE_TOLERANCE: f64 = 1e-13;

/// Largest blocklength searched without an explicit override.
pub fn default_max_n(y_outputs: usize, z_outputs: usize) -> usize {
    match y_outputs.max(z_outputs) {
        0..=2 => 4,
        3 => 3,
        _ => 2,
    }
}

/// Relay map indexed by received prefixes of length `0..n-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelayMap {
    n: usize,
    m: usize,
    bits: Vec<u8>,
}

fn pow(m: usize, k: usize) -> usize {
    m.pow(k as u32)
}

/// Index of the first prefix of length `k` in prefix order.
fn prefix_offset(m: usize, k: usize) -> usize {
    (0..k).map(|j| pow(m, j)).sum()
}

/// Base-`m` value of a prefix, first symbol most significant.
fn prefix_value(m: usize, prefix: &[usize]) -> usize {
    prefix.iter().fold(0, |acc, &y| acc * m + y)
}

fn prefix_digits(m: usize, k: usize, mut value: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for slot in out.iter_mut().rev() {
        *slot = value % m;
        value /= m;
    }
    out
}

impl RelayMap {
    /// Number of prefixes the relay must answer.
    pub fn prefix_count(n: usize, m: usize) -> usize {
        prefix_offset(m, n)
    }

    /// The relay map whose bit for prefix id `i` is bit `i` of `counter`.
    pub fn from_counter(counter: u64, n: usize, m: usize) -> Self {
        let len = Self::prefix_count(n, m);
        Self {
            n,
            m,
            bits: (0..len).map(|i| ((counter >> i) & 1) as u8).collect(),
        }
    }

    pub fn from_fn(n: usize, m: usize, f: impl Fn(&[usize]) -> u8) -> Self {
        let mut bits = Vec::with_capacity(Self::prefix_count(n, m));
        for k in 0..n {
            for v in 0..pow(m, k) {
                bits.push(f(&prefix_digits(m, k, v)) & 1);
            }
        }
        Self { n, m, bits }
    }

    /// Bit sent after receiving `prefix` (length below `n`).
    pub fn next_bit(&self, prefix: &[usize]) -> u8 {
        self.bits[prefix_offset(self.m, prefix.len()) + prefix_value(self.m, prefix)]
    }

    /// The relay's full transmission `w_1..w_n` for a received sequence;
    /// only the first `n - 1` symbols of `ys` matter.
    pub fn transmission(&self, ys: &[usize]) -> Vec<u8> {
        (0..self.n).map(|k| self.next_bit(&ys[..k])).collect()
    }

    pub fn counter(&self) -> u64 {
        self.bits
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (u64::from(b) << i))
    }
}

impl Serialize for RelayMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.bits.len()))?;
        for k in 0..self.n {
            for v in 0..pow(self.m, k) {
                let key = prefix_string(&prefix_digits(self.m, k, v));
                map.serialize_entry(&key, &self.bits[prefix_offset(self.m, k) + v])?;
            }
        }
        map.end()
    }
}

fn prefix_string(prefix: &[usize]) -> String {
    prefix.iter().map(|y| y.to_string()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolTable {
    pub x0: Codeword,
    pub x1: Codeword,
    pub relay: RelayMap,
}

impl ProtocolTable {
    pub fn n(&self) -> usize {
        self.x0.len()
    }
}

/// Conditional error probabilities given a received prefix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrefixError {
    pub pe0: f64,
    pub pe1: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactErrorTable {
    pub pe0: f64,
    pub pe1: f64,
    n: usize,
    m: usize,
    /// Indexed by prefix id over lengths `0..=n`.
    per_prefix: Vec<PrefixError>,
}

impl ExactErrorTable {
    pub fn sum(&self) -> f64 {
        self.pe0 + self.pe1
    }

    /// Conditional errors given that the relay received `prefix`
    /// (`prefix.len() <= n`).
    pub fn given(&self, prefix: &[usize]) -> PrefixError {
        self.per_prefix[prefix_offset(self.m, prefix.len()) + prefix_value(self.m, prefix)]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// All prefixes of length `k` with their conditional errors.
    pub fn depth(&self, k: usize) -> impl Iterator<Item = (Vec<usize>, PrefixError)> + '_ {
        let off = prefix_offset(self.m, k);
        (0..pow(self.m, k)).map(move |v| (prefix_digits(self.m, k, v), self.per_prefix[off + v]))
    }
}

impl Serialize for ExactErrorTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            pe0: f64,
            pe1: f64,
            per_prefix: BTreeMap<String, &'a PrefixError>,
        }
        let mut per_prefix = BTreeMap::new();
        for k in 0..=self.n {
            let off = prefix_offset(self.m, k);
            for v in 0..pow(self.m, k) {
                per_prefix.insert(
                    prefix_string(&prefix_digits(self.m, k, v)),
                    &self.per_prefix[off + v],
                );
            }
        }
        Wire {
            pe0: self.pe0,
            pe1: self.pe1,
            per_prefix,
        }
        .serialize(serializer)
    }
}

/// Precomputed channel tables for one `(P, Q, n)`.
pub struct ProtocolOracle {
    p: BinaryInputChannel,
    q: BinaryInputChannel,
    n: usize,
    my: usize,
    mz: usize,
    /// `P^(n-1)(y_1..y_{n-1} | x)` by codeword index and leaf index.
    leaf_prob: Vec<Vec<f64>>,
    /// `Q^n(z | w)` by relay-word index and output index.
    qn: Vec<Vec<f64>>,
}

fn codeword_index(c: &Codeword) -> usize {
    c.bits().iter().fold(0, |acc, &b| (acc << 1) | usize::from(b))
}

impl ProtocolOracle {
    /// Builds the tables, refusing blocklengths above the default cap unless
    /// `override_cap` is set.
    pub fn new(
        p: &BinaryInputChannel,
        q: &BinaryInputChannel,
        n: usize,
        override_cap: bool,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "n",
                value: 0.0,
                range: "n >= 1",
            });
        }
        let (my, mz) = (p.outputs(), q.outputs());
        let limit = default_max_n(my, mz);
        if n > limit && !override_cap {
            return Err(Error::CapExceeded {
                what: "blocklength",
                limit: limit as u128,
                requested: n as u128,
            });
        }
        let leaves = pow(my, n - 1);
        let leaf_prob = (0..1usize << n)
            .map(|x| {
                (0..leaves)
                    .map(|leaf| {
                        prefix_digits(my, n - 1, leaf)
                            .iter()
                            .enumerate()
                            .map(|(i, &y)| p.row(((x >> (n - 1 - i)) & 1) as u8)[y])
                            .product()
                    })
                    .collect()
            })
            .collect();
        let qn = (0..1usize << n)
            .map(|w| {
                (0..pow(mz, n))
                    .map(|z| {
                        prefix_digits(mz, n, z)
                            .iter()
                            .enumerate()
                            .map(|(i, &zi)| q.row(((w >> (n - 1 - i)) & 1) as u8)[zi])
                            .product()
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            p: p.clone(),
            q: q.clone(),
            n,
            my,
            mz,
            leaf_prob,
            qn,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of protocols in the full enumeration.
    pub fn protocol_count(&self) -> u128 {
        let relay_bits = RelayMap::prefix_count(self.n, self.my) as u32;
        (1u128 << (2 * self.n)) << relay_bits
    }

    fn check_protocol(&self, pt: &ProtocolTable) -> Result<()> {
        if pt.x0.len() != self.n || pt.x1.len() != self.n {
            return Err(Error::LengthMismatch(pt.x0.len(), self.n));
        }
        if pt.x1.len() != pt.x0.len() {
            return Err(Error::LengthMismatch(pt.x0.len(), pt.x1.len()));
        }
        if pt.relay.n != self.n || pt.relay.m != self.my {
            return Err(Error::LengthMismatch(pt.relay.n, self.n));
        }
        Ok(())
    }

    /// Relay-word index for every leaf `y_1..y_{n-1}`.
    fn relay_words(&self, relay: &RelayMap) -> Vec<usize> {
        (0..pow(self.my, self.n - 1))
            .map(|leaf| {
                let ys = prefix_digits(self.my, self.n - 1, leaf);
                (0..self.n).fold(0, |acc, k| (acc << 1) | usize::from(relay.next_bit(&ys[..k])))
            })
            .collect()
    }

    /// `P(z | Θ = 0)` and `P(z | Θ = 1)` over all `z` sequences.
    pub fn z_likelihoods(&self, pt: &ProtocolTable) -> Result<[Vec<f64>; 2]> {
        self.check_protocol(pt)?;
        let words = self.relay_words(&pt.relay);
        Ok([&pt.x0, &pt.x1].map(|x| self.z_law(&words, codeword_index(x))))
    }

    fn z_law(&self, words: &[usize], x: usize) -> Vec<f64> {
        let mut w_law = vec![CompensatedSum::new(); 1 << self.n];
        for (leaf, &w) in words.iter().enumerate() {
            w_law[w].add(self.leaf_prob[x][leaf]);
        }
        (0..pow(self.mz, self.n))
            .map(|z| {
                w_law
                    .iter()
                    .enumerate()
                    .map(|(w, acc)| acc.value() * self.qn[w][z])
                    .collect::<CompensatedSum>()
                    .value()
            })
            .collect()
    }

    /// Exact conditional errors of `pt` under the MAP decoder (ties decide
    /// Θ = 0), overall and for every received prefix.
    pub fn exact_error(&self, pt: &ProtocolTable) -> Result<ExactErrorTable> {
        let [l0, l1] = self.z_likelihoods(pt)?;
        let decide_one: Vec<bool> = l0.iter().zip(&l1).map(|(a, b)| b > a).collect();

        // P(decoder errs | relay word w) under each hypothesis
        let err_given_w = |theta: bool| -> Vec<f64> {
            self.qn
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(&decide_one)
                        .filter(|&(_, &d)| d != theta)
                        .map(|(p, _)| *p)
                        .collect::<CompensatedSum>()
                        .value()
                })
                .collect()
        };
        let err0_w = err_given_w(false);
        let err1_w = err_given_w(true);

        let words = self.relay_words(&pt.relay);
        let (n, m) = (self.n, self.my);
        let mut per_prefix = vec![
            PrefixError {
                pe0: 0.0,
                pe1: 0.0
            };
            prefix_offset(m, n + 1)
        ];
        // leaves at depth n - 1, and depth n copies them (y_n is never used)
        let leaf_off = prefix_offset(m, n - 1);
        for (leaf, &w) in words.iter().enumerate() {
            let e = PrefixError {
                pe0: err0_w[w],
                pe1: err1_w[w],
            };
            per_prefix[leaf_off + leaf] = e;
            for y in 0..m {
                per_prefix[prefix_offset(m, n) + leaf * m + y] = e;
            }
        }
        let x0 = pt.x0.bits();
        let x1 = pt.x1.bits();
        for k in (0..n - 1).rev() {
            let (off, child_off) = (prefix_offset(m, k), prefix_offset(m, k + 1));
            let r0 = self.p.row(x0[k]);
            let r1 = self.p.row(x1[k]);
            for v in 0..pow(m, k) {
                let mut a = CompensatedSum::new();
                let mut b = CompensatedSum::new();
                for y in 0..m {
                    let child = per_prefix[child_off + v * m + y];
                    a.add(r0[y] * child.pe0);
                    b.add(r1[y] * child.pe1);
                }
                per_prefix[off + v] = PrefixError {
                    pe0: a.value(),
                    pe1: b.value(),
                };
            }
        }
        Ok(ExactErrorTable {
            pe0: per_prefix[0].pe0,
            pe1: per_prefix[0].pe1,
            n,
            m,
            per_prefix,
        })
    }

    /// `pe0 + pe1` of the MAP decoder from precomputed relay words.
    fn error_sum(&self, words: &[usize], x0: usize, x1: usize, scratch: &mut Scratch) -> f64 {
        scratch.w0.iter_mut().for_each(|v| *v = 0.0);
        scratch.w1.iter_mut().for_each(|v| *v = 0.0);
        for (leaf, &w) in words.iter().enumerate() {
            scratch.w0[w] += self.leaf_prob[x0][leaf];
            scratch.w1[w] += self.leaf_prob[x1][leaf];
        }
        let mut total = 0.0;
        for z in 0..self.qn[0].len() {
            let (mut a, mut b) = (0.0, 0.0);
            for (w, row) in self.qn.iter().enumerate() {
                a += scratch.w0[w] * row[z];
                b += scratch.w1[w] * row[z];
            }
            total += a.min(b);
        }
        total
    }

    /// Searches every deterministic protocol for the smallest `pe0 + pe1`.
    pub fn optimal_protocol(&self) -> Result<(ProtocolTable, ExactErrorTable)> {
        let relay_bits = RelayMap::prefix_count(self.n, self.my);
        if relay_bits > 40 {
            return Err(Error::CapExceeded {
                what: "relay map bits",
                limit: 40,
                requested: relay_bits as u128,
            });
        }
        let relays = 1u64 << relay_bits;
        let codewords = 1usize << self.n;

        // relay words do not depend on the codewords; share them across pairs
        let words: Vec<Vec<usize>> = if relays <= 1 << 16 {
            (0..relays)
                .map(|r| self.relay_words(&RelayMap::from_counter(r, self.n, self.my)))
                .collect()
        } else {
            Vec::new()
        };

        let per_pair: Vec<(f64, u64)> = (0..codewords * codewords)
            .into_par_iter()
            .map(|pair| {
                let (x0, x1) = (pair / codewords, pair % codewords);
                let mut scratch = Scratch::new(1 << self.n);
                let mut best = (f64::INFINITY, 0u64);
                for r in 0..relays {
                    let sum = if words.is_empty() {
                        let w = self.relay_words(&RelayMap::from_counter(r, self.n, self.my));
                        self.error_sum(&w, x0, x1, &mut scratch)
                    } else {
                        self.error_sum(&words[r as usize], x0, x1, &mut scratch)
                    };
                    if sum < best.0 - TIE_TOLERANCE {
                        best = (sum, r);
                    }
                }
                best
            })
            .collect();

        let mut best = (f64::INFINITY, 0usize, 0u64);
        for (pair, &(sum, r)) in per_pair.iter().enumerate() {
            if sum < best.0 - TIE_TOLERANCE {
                best = (sum, pair, r);
            }
        }
        let (_, pair, r) = best;
        let pt = ProtocolTable {
            x0: Codeword::from_index((pair / codewords) as u64, self.n),
            x1: Codeword::from_index((pair % codewords) as u64, self.n),
            relay: RelayMap::from_counter(r, self.n, self.my),
        };
        let table = self.exact_error(&pt)?;
        Ok((pt, table))
    }
}

struct Scratch {
    w0: Vec<f64>,
    w1: Vec<f64>,
}

impl Scratch {
    fn new(len: usize) -> Self {
        Self {
            w0: vec![0.0; len],
            w1: vec![0.0; len],
        }
    }
}

/// Exact error of one protocol, within the default blocklength cap.
pub fn exact_error(
    pt: &ProtocolTable,
    p: &BinaryInputChannel,
    q: &BinaryInputChannel,
) -> Result<ExactErrorTable> {
    ProtocolOracle::new(p, q, pt.n(), false)?.exact_error(pt)
}

/// Best deterministic protocol at blocklength `n`, within the default cap.
pub fn optimal_protocol(
    p: &BinaryInputChannel,
    q: &BinaryInputChannel,
    n: usize,
) -> Result<(ProtocolTable, ExactErrorTable)> {
    ProtocolOracle::new(p, q, n, false)?.optimal_protocol()
}

/// MAP error sum when the protocol is drawn at random, `a` with probability
/// `weight` and `b` otherwise, and the decoder does not see the draw.
pub fn mixture_error_sum(
    oracle: &ProtocolOracle,
    a: &ProtocolTable,
    b: &ProtocolTable,
    weight: f64,
) -> Result<f64> {
    let la = oracle.z_likelihoods(a)?;
    let lb = oracle.z_likelihoods(b)?;
    Ok((0..la[0].len())
        .map(|z| {
            let l0 = weight * la[0][z] + (1.0 - weight) * lb[0][z];
            let l1 = weight * la[1][z] + (1.0 - weight) * lb[1][z];
            l0.min(l1)
        })
        .collect::<CompensatedSum>()
        .value())
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificationReport {
    pub n: usize,
    pub protocol: ProtocolTable,
    pub pe0: f64,
    pub pe1: f64,
    pub pe_sum: f64,
    /// `-ln(pe0 + pe1)` of the optimal protocol.
    pub lhs: f64,
    pub bound: f64,
    pub slack: f64,
    pub passed: bool,
}

/// Runs the exhaustive search and compares the optimal error against the
/// finite-length converse.
pub fn certify_theorem3(
    p: &BinaryInputChannel,
    q: &BinaryInputChannel,
    n: usize,
) -> Result<CertificationReport> {
    certify_with(&ProtocolOracle::new(p, q, n, false)?)
}

pub fn certify_with(oracle: &ProtocolOracle) -> Result<CertificationReport> {
    let (protocol, table) = oracle.optimal_protocol()?;
    let bound = theorem3_bound(oracle.n, &oracle.p, &oracle.q)?;
    let pe_sum = table.sum();
    let lhs = -pe_sum.ln();
    Ok(CertificationReport {
        n: oracle.n,
        protocol,
        pe0: table.pe0,
        pe1: table.pe1,
        pe_sum,
        lhs,
        bound,
        slack: bound - lhs,
        passed: lhs <= bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainViolation {
    /// Hypothesis the conditional error refers to.
    pub theta: u8,
    pub prefix: Vec<usize>,
    pub next: usize,
    pub parent: f64,
    pub child: f64,
    pub factor: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ChainingReport {
    pub checked: usize,
    /// `pe(y_1..k) < p_min pe(y_1..k+1)`
    pub violations: Vec<ChainViolation>,
    /// `pe(y_1..k) < P(y_{k+1} | x_{k+1}) pe(y_1..k+1)`
    pub tight_violations: Vec<ChainViolation>,
}

/// Checks that extending a received prefix by one positive-probability
/// symbol can raise the conditional error by at most a factor `1/p_min`.
pub fn check_prefix_chaining(
    pt: &ProtocolTable,
    table: &ExactErrorTable,
    p: &BinaryInputChannel,
    q: &BinaryInputChannel,
) -> ChainingReport {
    const SLACK: f64 = 1e-14;
    let p_min = joint_p_min(p, q);
    let mut report = ChainingReport::default();
    for k in 0..table.n {
        for (prefix, parent) in table.depth(k) {
            for y in 0..p.outputs() {
                let mut child_prefix = prefix.clone();
                child_prefix.push(y);
                let child = table.given(&child_prefix);
                for (theta, x, par, ch) in [
                    (0u8, &pt.x0, parent.pe0, child.pe0),
                    (1u8, &pt.x1, parent.pe1, child.pe1),
                ] {
                    let prob = p.row(x.bits()[k])[y];
                    if prob <= 0.0 {
                        continue;
                    }
                    report.checked += 1;
                    let violation = |factor: f64| ChainViolation {
                        theta,
                        prefix: prefix.clone(),
                        next: y,
                        parent: par,
                        child: ch,
                        factor,
                    };
                    if par < p_min * ch - SLACK {
                        report.violations.push(violation(p_min));
                    }
                    if par < prob * ch - SLACK {
                        report.tight_violations.push(violation(prob));
                    }
                }
            }
        }
    }
    report
}

/// A channel with exact rational transition probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalChannel {
    rows: [Vec<BigRational>; 2],
}

impl RationalChannel {
    /// Rows given as strings such as `"1/10"` or `"0.9"`.
    pub fn parse(row0: &[&str], row1: &[&str]) -> Result<Self> {
        let parse_row = |row: &[&str]| -> Result<Vec<BigRational>> {
            row.iter().map(|s| parse_rational(s)).collect()
        };
        let rows = [parse_row(row0)?, parse_row(row1)?];
        if rows[0].len() != rows[1].len() {
            return Err(Error::RaggedRows(rows[0].len(), rows[1].len()));
        }
        for (r, row) in rows.iter().enumerate() {
            let sum: BigRational = row.iter().sum();
            if sum != BigRational::one() {
                return Err(Error::RowSumOutOfTolerance {
                    row: r,
                    sum: rational_to_f64(&sum),
                });
            }
        }
        Ok(Self { rows })
    }

    pub fn row(&self, bit: u8) -> &[BigRational] {
        &self.rows[usize::from(bit & 1)]
    }

    pub fn outputs(&self) -> usize {
        self.rows[0].len()
    }

    /// Nearest floating-point channel.
    pub fn to_f64(&self) -> Result<BinaryInputChannel> {
        BinaryInputChannel::validate(
            &self
                .rows
                .iter()
                .map(|r| r.iter().map(rational_to_f64).collect())
                .collect::<Vec<_>>(),
        )
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidParameter {
        name: "rational",
        value: f64::NAN,
        range: "a fraction a/b or a finite decimal",
    };
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    let digits = format!("{int}{frac}");
    let num = BigInt::from_str(&digits).map_err(|_| bad())?;
    let den = num::pow(BigInt::from(10), frac.len());
    Ok(BigRational::new(num, den))
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact `(pe0, pe1)` of a protocol over rational channels, MAP decoding
/// with ties to Θ = 0.
pub fn exact_error_rational(
    pt: &ProtocolTable,
    p: &RationalChannel,
    q: &RationalChannel,
) -> Result<(BigRational, BigRational)> {
    let n = pt.n();
    if pt.x1.len() != n {
        return Err(Error::LengthMismatch(n, pt.x1.len()));
    }
    let (my, mz) = (p.outputs(), q.outputs());
    let likelihood = |x: &Codeword| -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); pow(mz, n)];
        for leaf in 0..pow(my, n.saturating_sub(1)) {
            let ys = prefix_digits(my, n - 1, leaf);
            let py: BigRational = ys
                .iter()
                .enumerate()
                .map(|(i, &y)| p.row(x.bits()[i])[y].clone())
                .product();
            let w = pt.relay.transmission(&ys);
            for (z, slot) in out.iter_mut().enumerate() {
                let zs = prefix_digits(mz, n, z);
                let qz: BigRational = zs
                    .iter()
                    .zip(&w)
                    .map(|(&zi, &wi)| q.row(wi)[zi].clone())
                    .product();
                *slot += &py * qz;
            }
        }
        out
    };
    let l0 = likelihood(&pt.x0);
    let l1 = likelihood(&pt.x1);
    let mut pe0 = BigRational::zero();
    let mut pe1 = BigRational::zero();
    for (a, b) in l0.iter().zip(&l1) {
        if b > a {
            pe0 += a;
        } else {
            pe1 += b;
        }
    }
    Ok((pe0, pe1))
}

impl fmt::Display for ProtocolTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x0={} x1={} relay={:#x}", self.x0, self.x1, self.relay.counter())
    }
}
