//! Chernoff divergence, its s-derivatives, tilted distributions and KL
//! divergence, plus their tensorized versions over codeword pairs.
//!
//! Everything is in nats. For two distributions `p0`, `p1` on the same
//! alphabet,
//!
//! ```text
//! d_c(p0, p1, s) = -ln sum_x p0(x)^(1-s) p1(x)^s,     0 <= s <= 1
//! ```
//!
//! The sum runs over the shared support only. On `(0, 1)` that is the same
//! sum; at the endpoints it gives the one-sided limits, e.g.
//! `d_c(p0, p1, 0) = -ln sum_{x: p1(x) > 0} p0(x)`.
//!
//! The first and second derivatives in `s` are the negated mean and variance
//! of the log-likelihood ratio `ln(p1/p0)` under the tilted distribution
//! `Q_s(x) ∝ p0(x)^(1-s) p1(x)^s`.

use serde::{Deserialize, Serialize};

use crate::channel::{BinaryInputChannel, Codeword};
use crate::error::{Error, Result};

/// Value and first two s-derivatives of a Chernoff curve at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChernoffCurvePoint {
    pub s: f64,
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TiltedDistribution {
    pub s: f64,
    pub weights: Vec<f64>,
}

impl TiltedDistribution {
    pub fn mass(&self, x: usize) -> f64 {
        self.weights[x]
    }
}

/// Precomputed log-masses on the shared support of a pair of distributions.
///
/// Evaluating the curve repeatedly (optimizers, grids) through this type
/// avoids recomputing logarithms.
#[derive(Clone, Debug)]
pub struct ChernoffCurve {
    alphabet: usize,
    index: Vec<usize>,
    ln0: Vec<f64>,
    ln1: Vec<f64>,
}

impl ChernoffCurve {
    pub fn new(p0: &[f64], p1: &[f64]) -> Result<Self> {
        if p0.len() != p1.len() {
            return Err(Error::AlphabetMismatch(p0.len(), p1.len()));
        }
        let mut curve = Self {
            alphabet: p0.len(),
            index: Vec::new(),
            ln0: Vec::new(),
            ln1: Vec::new(),
        };
        for (x, (&a, &b)) in p0.iter().zip(p1).enumerate() {
            if a > 0.0 && b > 0.0 {
                curve.index.push(x);
                curve.ln0.push(a.ln());
                curve.ln1.push(b.ln());
            }
        }
        if curve.index.is_empty() {
            return Err(Error::DisjointSupport);
        }
        Ok(curve)
    }

    /// Curve of the two rows of a channel, in input order `(a, b)`.
    pub fn for_inputs(c: &BinaryInputChannel, a: u8, b: u8) -> Result<Self> {
        Self::new(c.row(a), c.row(b))
    }

    /// The same pair with the arguments exchanged; `s` maps to `1 - s`.
    pub fn reversed(&self) -> Self {
        Self {
            alphabet: self.alphabet,
            index: self.index.clone(),
            ln0: self.ln1.clone(),
            ln1: self.ln0.clone(),
        }
    }

    fn exponents(&self, s: f64) -> impl Iterator<Item = f64> + '_ {
        self.ln0
            .iter()
            .zip(&self.ln1)
            .map(move |(l0, l1)| (1.0 - s) * l0 + s * l1)
    }

    /// `ln sum_x p0^(1-s) p1^s`, shifted by the largest exponent.
    fn log_normalizer(&self, s: f64) -> f64 {
        let top = self.exponents(s).fold(f64::NEG_INFINITY, f64::max);
        let rest: f64 = self.exponents(s).map(|a| (a - top).exp()).sum();
        top + rest.ln()
    }

    /// `d_c` at `s ∈ [0, 1]`. Clamped at zero, which it can only undershoot by
    /// rounding.
    pub fn value(&self, s: f64) -> f64 {
        (-self.log_normalizer(s)).max(0.0)
    }

    /// Tilted weights on the shared support, in support order.
    fn shared_weights(&self, s: f64) -> Vec<f64> {
        let log_z = self.log_normalizer(s);
        self.exponents(s).map(|a| (a - log_z).exp()).collect()
    }

    /// Value and derivatives at `s ∈ [0, 1]`; at the endpoints the
    /// derivatives are the one-sided limits.
    pub fn point(&self, s: f64) -> ChernoffCurvePoint {
        let w = self.shared_weights(s);
        let ratio = |i: usize| self.ln1[i] - self.ln0[i];
        let mean: f64 = w.iter().enumerate().map(|(i, wi)| wi * ratio(i)).sum();
        let var: f64 = w
            .iter()
            .enumerate()
            .map(|(i, wi)| wi * (ratio(i) - mean).powi(2))
            .sum();
        ChernoffCurvePoint {
            s,
            value: self.value(s),
            d1: -mean,
            d2: -var,
        }
    }

    pub fn tilted(&self, s: f64) -> TiltedDistribution {
        let mut weights = vec![0.0; self.alphabet];
        for (&x, w) in self.index.iter().zip(self.shared_weights(s)) {
            weights[x] = w;
        }
        TiltedDistribution { s, weights }
    }

    /// True when the log-likelihood ratio is constant on the shared support,
    /// i.e. the curve is a straight line in `s`.
    pub fn is_linear(&self) -> bool {
        let r0 = self.ln1[0] - self.ln0[0];
        self.ln0
            .iter()
            .zip(&self.ln1)
            .all(|(l0, l1)| ((l1 - l0) - r0).abs() <= 1e-12)
    }

    /// True when the curve does not depend on `s` at all.
    pub fn is_flat(&self) -> bool {
        self.is_linear() && (self.ln1[0] - self.ln0[0]).abs() <= 1e-12
    }
}

fn check_closed(s: f64) -> Result<()> {
    if (0.0..=1.0).contains(&s) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "s",
            value: s,
            range: "[0, 1]",
        })
    }
}

fn check_open(s: f64) -> Result<()> {
    check_closed(s)?;
    if s == 0.0 || s == 1.0 {
        return Err(Error::EndpointDerivative(s));
    }
    Ok(())
}

/// Chernoff divergence with parameter `s`, endpoints by continuity.
pub fn d_c(p0: &[f64], p1: &[f64], s: f64) -> Result<f64> {
    check_closed(s)?;
    Ok(ChernoffCurve::new(p0, p1)?.value(s))
}

/// Value, first and second derivative at an interior `s`.
pub fn d_c_derivatives(p0: &[f64], p1: &[f64], s: f64) -> Result<ChernoffCurvePoint> {
    check_open(s)?;
    Ok(ChernoffCurve::new(p0, p1)?.point(s))
}

/// Normalized geometric mixture `p0^(1-s) p1^s`.
pub fn tilt(p0: &[f64], p1: &[f64], s: f64) -> Result<TiltedDistribution> {
    check_open(s)?;
    Ok(ChernoffCurve::new(p0, p1)?.tilted(s))
}

/// `KL(p || q)` in nats, with `0 ln 0 = 0`.
pub fn kl(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::AlphabetMismatch(p.len(), q.len()));
    }
    let mut total = 0.0;
    for (index, (&pi, &qi)) in p.iter().zip(q).enumerate() {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Err(Error::AbsoluteContinuityViolation { index });
        }
        total += pi * (pi / qi).ln();
    }
    Ok(total.max(0.0))
}

impl BinaryInputChannel {
    /// `d_c(row0, row1, s)`.
    pub fn d_c(&self, s: f64) -> Result<f64> {
        d_c(self.row(0), self.row(1), s)
    }

    pub fn chernoff_curve(&self) -> Result<ChernoffCurve> {
        ChernoffCurve::for_inputs(self, 0, 1)
    }
}

fn check_lengths(x0: &Codeword, x1: &Codeword) -> Result<()> {
    if x0.len() != x1.len() {
        return Err(Error::LengthMismatch(x0.len(), x1.len()));
    }
    Ok(())
}

/// Per-position curves for a codeword pair. Positions where the codewords
/// agree contribute nothing and are skipped.
struct SequenceCurve {
    forward: Option<ChernoffCurve>,
    n01: usize,
    n10: usize,
}

impl SequenceCurve {
    fn new(x0: &Codeword, x1: &Codeword, c: &BinaryInputChannel) -> Result<Self> {
        check_lengths(x0, x1)?;
        let n01 = x0.count_pairs(x1, 0, 1);
        let n10 = x0.count_pairs(x1, 1, 0);
        let forward = if n01 + n10 > 0 {
            match c.chernoff_curve() {
                Ok(curve) => Some(curve),
                Err(Error::DisjointSupport) => {
                    let first = x0
                        .bits()
                        .iter()
                        .zip(x1.bits())
                        .position(|(a, b)| a != b)
                        .unwrap_or(0);
                    return Err(Error::DisjointSupportAt(first));
                }
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        Ok(Self { forward, n01, n10 })
    }

    fn point(&self, s: f64) -> ChernoffCurvePoint {
        let Some(curve) = &self.forward else {
            return ChernoffCurvePoint {
                s,
                value: 0.0,
                d1: 0.0,
                d2: 0.0,
            };
        };
        let (a, b) = (self.n01 as f64, self.n10 as f64);
        let fwd = curve.point(s);
        // a (1,0) position is the (0,1) curve read at 1 - s with the sign of
        // the first derivative flipped
        let rev = curve.point(1.0 - s);
        ChernoffCurvePoint {
            s,
            value: a * fwd.value + b * rev.value,
            d1: a * fwd.d1 - b * rev.d1,
            d2: a * fwd.d2 + b * rev.d2,
        }
    }
}

/// Chernoff divergence between the output laws of `x0` and `x1` sent over
/// `n` uses of `c`.
pub fn d_c_seq(x0: &Codeword, x1: &Codeword, c: &BinaryInputChannel, s: f64) -> Result<f64> {
    check_closed(s)?;
    Ok(SequenceCurve::new(x0, x1, c)?.point(s).value)
}

/// Tensorized value and derivatives, endpoints by one-sided limits.
pub fn d_c_seq_point(
    x0: &Codeword,
    x1: &Codeword,
    c: &BinaryInputChannel,
    s: f64,
) -> Result<ChernoffCurvePoint> {
    check_closed(s)?;
    Ok(SequenceCurve::new(x0, x1, c)?.point(s))
}

/// Position-wise tilted distributions; their product is the tilted law of
/// the whole output sequence.
pub fn tilt_seq(
    x0: &Codeword,
    x1: &Codeword,
    c: &BinaryInputChannel,
    t: f64,
) -> Result<Vec<TiltedDistribution>> {
    check_lengths(x0, x1)?;
    check_open(t)?;
    x0.bits()
        .iter()
        .zip(x1.bits())
        .enumerate()
        .map(|(i, (&a, &b))| {
            ChernoffCurve::for_inputs(c, a, b)
                .map(|curve| curve.tilted(t))
                .map_err(|e| match e {
                    Error::DisjointSupport => Error::DisjointSupportAt(i),
                    other => other,
                })
        })
        .collect()
}

/// Product mass of an output sequence under position-wise distributions.
pub fn product_mass(dists: &[TiltedDistribution], ys: &[usize]) -> f64 {
    dists.iter().zip(ys).map(|(d, &y)| d.mass(y)).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bsc(p: f64) -> BinaryInputChannel {
        BinaryInputChannel::bsc(p).unwrap()
    }

    #[test]
    fn identical_arguments_give_zero() {
        let p = [0.2, 0.3, 0.5];
        for s in [0.0, 0.25, 0.5, 1.0] {
            assert_eq!(d_c(&p, &p, s).unwrap(), 0.0);
        }
    }

    #[test]
    fn bsc_closed_form_at_half() {
        let c = bsc(0.1);
        let v = c.d_c(0.5).unwrap();
        assert!((v - (-(0.6f64).ln())).abs() < 1e-15);
        assert!((v - 0.510_826).abs() < 1e-6);
    }

    #[test]
    fn z_channel_is_linear() {
        let z = BinaryInputChannel::z_channel(0.5).unwrap();
        for s in [0.0, 0.1, 0.5, 0.9, 1.0] {
            let v = z.d_c(s).unwrap();
            assert!((v - (-s * 0.5f64.ln())).abs() < 1e-15, "s = {s}");
        }
        assert!(z.chernoff_curve().unwrap().is_linear());
        assert!(!z.chernoff_curve().unwrap().is_flat());
    }

    #[test]
    fn bec_is_flat() {
        let c = BinaryInputChannel::bec(0.3).unwrap();
        assert!(c.chernoff_curve().unwrap().is_flat());
        assert!((c.d_c(0.2).unwrap() + 0.3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn disjoint_and_mismatched_inputs() {
        let c = BinaryInputChannel::noiseless();
        assert_eq!(c.d_c(0.5), Err(Error::DisjointSupport));
        assert_eq!(
            d_c(&[0.5, 0.5], &[0.2, 0.3, 0.5], 0.5),
            Err(Error::AlphabetMismatch(2, 3))
        );
        assert!(matches!(
            d_c(&[0.5, 0.5], &[0.5, 0.5], 1.5),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn derivatives_refuse_endpoints() {
        let c = bsc(0.1);
        assert_eq!(
            d_c_derivatives(c.row(0), c.row(1), 0.0),
            Err(Error::EndpointDerivative(0.0))
        );
        assert_eq!(
            d_c_derivatives(c.row(0), c.row(1), 1.0),
            Err(Error::EndpointDerivative(1.0))
        );
    }

    #[test]
    fn symmetric_channel_has_flat_tangent_at_half() {
        let c = bsc(0.1);
        let pt = d_c_derivatives(c.row(0), c.row(1), 0.5).unwrap();
        assert!(pt.d1.abs() < 1e-15);
        assert!(pt.d2 < 0.0);
    }

    #[test]
    fn tilt_examples() {
        let c = bsc(0.1);
        let t = tilt(c.row(0), c.row(1), 0.5).unwrap();
        assert!((t.weights[0] - 0.5).abs() < 1e-15 && (t.weights[1] - 0.5).abs() < 1e-15);

        let p = [0.2, 0.3, 0.5];
        let same = tilt(&p, &p, 0.3).unwrap();
        for (a, b) in same.weights.iter().zip(&p) {
            assert!((a - b).abs() < 1e-15);
        }

        let z = BinaryInputChannel::z_channel(0.5).unwrap();
        let tz = tilt(z.row(0), z.row(1), 0.5).unwrap();
        assert_eq!(tz.weights, vec![1.0, 0.0]);
    }

    #[test]
    fn tilt_normalizer_matches_divergence() {
        let p0 = [0.7, 0.2, 0.1];
        let p1 = [0.05, 0.05, 0.9];
        let s = 0.37;
        let unnormalized: f64 = p0
            .iter()
            .zip(&p1)
            .map(|(a, b): (&f64, &f64)| a.powf(1.0 - s) * b.powf(s))
            .sum();
        let expected = (-d_c(&p0, &p1, s).unwrap()).exp();
        assert!((unnormalized - expected).abs() < 1e-14);
    }

    #[test]
    fn kl_examples() {
        let p = [0.5, 0.5];
        assert_eq!(kl(&p, &p).unwrap(), 0.0);
        let v = kl(&[0.5, 0.5], &[0.9, 0.1]).unwrap();
        let expected = 0.5 * (0.5f64 / 0.9).ln() + 0.5 * (0.5f64 / 0.1).ln();
        assert!((v - expected).abs() < 1e-15);
        assert!((v - 0.510_826).abs() < 1e-6);
        assert_eq!(
            kl(&[0.5, 0.5], &[1.0, 0.0]),
            Err(Error::AbsoluteContinuityViolation { index: 1 })
        );
        assert_eq!(kl(&[1.0, 0.0], &[0.5, 0.5]).unwrap(), 2f64.ln());
    }

    #[test]
    fn sequence_divergence_examples() {
        let c = bsc(0.1);
        let w: Codeword = "0110".parse().unwrap();
        assert_eq!(d_c_seq(&w, &w, &c, 0.4).unwrap(), 0.0);

        let v = d_c_seq(&"00".parse().unwrap(), &"11".parse().unwrap(), &c, 0.5).unwrap();
        assert!((v - 2.0 * -(0.6f64).ln()).abs() < 1e-15);
        assert!((v - 1.021_651).abs() < 1e-6);

        let z = BinaryInputChannel::z_channel(0.3).unwrap();
        let s = 0.2;
        let v = d_c_seq(&"01".parse().unwrap(), &"10".parse().unwrap(), &z, s).unwrap();
        let direct = z.d_c(s).unwrap() + z.d_c(1.0 - s).unwrap();
        assert!((v - direct).abs() < 1e-15);

        assert_eq!(
            d_c_seq(&"0".parse().unwrap(), &"01".parse().unwrap(), &c, 0.5),
            Err(Error::LengthMismatch(1, 2))
        );
    }

    #[test]
    fn tilt_seq_examples() {
        let c = bsc(0.1);
        let same = tilt_seq(&"00".parse().unwrap(), &"00".parse().unwrap(), &c, 0.3).unwrap();
        for t in &same {
            assert!((t.weights[0] - 0.9).abs() < 1e-15);
            assert!((t.weights[1] - 0.1).abs() < 1e-15);
        }
        let cross = tilt_seq(&"01".parse().unwrap(), &"10".parse().unwrap(), &c, 0.5).unwrap();
        for t in &cross {
            assert!((t.weights[0] - 0.5).abs() < 1e-15);
        }
        let err = tilt_seq(
            &"01".parse().unwrap(),
            &"00".parse().unwrap(),
            &BinaryInputChannel::noiseless(),
            0.5,
        );
        assert_eq!(err, Err(Error::DisjointSupportAt(1)));
    }
}
