//! Finite-blocklength converse bounds.
//!
//! The hypothesis-test bounds here come in disjunctive form: for a fixed
//! tilt `s` and any decision rule, at least one of
//!
//! ```text
//! -ln pe0 <= rhs0        -ln pe1 <= rhs1
//! ```
//!
//! holds. [`DisjunctionBound::holds`] evaluates that disjunction for given
//! error probabilities so the bounds can be checked exhaustively.

use serde::{Deserialize, Serialize};

use crate::channel::{joint_p_min, BinaryInputChannel, Codeword};
use crate::chernoff::{d_c_seq_point, ChernoffCurve};
use crate::error::{Error, Result};
use crate::exponent::{maximize_concave, two_hop_exponent};

/// Right-hand sides of the two branches at tilt `s`, in nats.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisjunctionBound {
    pub rhs0: f64,
    pub rhs1: f64,
    pub s: f64,
}

impl DisjunctionBound {
    /// Whether at least one branch holds for the given error probabilities.
    /// A zero error probability makes its branch fail.
    pub fn holds(&self, pe0: f64, pe1: f64) -> bool {
        -pe0.ln() <= self.rhs0 || -pe1.ln() <= self.rhs1
    }

    pub fn holds_with_slack(&self, pe0: f64, pe1: f64, slack: f64) -> bool {
        -pe0.ln() <= self.rhs0 + slack || -pe1.ln() <= self.rhs1 + slack
    }
}

fn ln4() -> f64 {
    4f64.ln()
}

/// `sqrt(2n) ln(1/p_min) + ln 4`.
pub fn dmc_remainder(n: usize, p_min: f64) -> f64 {
    (2.0 * n as f64).sqrt() * (1.0 / p_min).ln() + ln4()
}

/// `n E* + (sqrt(2n) + 4) ln(1/p_min) + ln 8`.
pub fn theorem3_rhs(n: usize, e_star: f64, p_min: f64) -> f64 {
    let n = n as f64;
    n * e_star + ((2.0 * n).sqrt() + 4.0) * (1.0 / p_min).ln() + 8f64.ln()
}

/// Upper bound on `-ln(pe0 + pe1)` for any encoder, relay and decoder at
/// blocklength `n`, using the optimal two-hop exponent and the smallest
/// nonzero transition probability of either channel.
pub fn theorem3_bound(n: usize, p: &BinaryInputChannel, q: &BinaryInputChannel) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
            range: "n >= 1",
        });
    }
    if p.support_relation().is_disjoint() || q.support_relation().is_disjoint() {
        return Err(Error::DegeneratePair);
    }
    let report = two_hop_exponent(p, q)?;
    Ok(theorem3_rhs(n, report.e_star, joint_p_min(p, q)))
}

fn check_open(s: f64) -> Result<()> {
    if s > 0.0 && s < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "s",
            value: s,
            range: "(0, 1)",
        })
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

/// Disjunction for a binary test between two arbitrary distributions, with
/// the exact curvature term `s sqrt(-2 d_c'')`.
pub fn pairwise_test_bounds(pi: &[f64], pi_prime: &[f64], s: f64) -> Result<DisjunctionBound> {
    check_open(s)?;
    let pt = ChernoffCurve::new(pi, pi_prime)?.point(s);
    let curvature = (-2.0 * pt.d2).max(0.0).sqrt();
    Ok(DisjunctionBound {
        rhs0: pt.value - s * pt.d1 + s * curvature + ln4(),
        rhs1: pt.value + (1.0 - s) * pt.d1 + (1.0 - s) * curvature + ln4(),
        s,
    })
}

/// Disjunction for codewords `w0`, `w1` sent over `n` uses of `q`; the
/// curvature term is replaced by its worst case `sqrt(2n) ln(1/p_min)`.
pub fn dmc_pair_bounds(
    w0: &Codeword,
    w1: &Codeword,
    q: &BinaryInputChannel,
    s: f64,
) -> Result<DisjunctionBound> {
    check_closed(s)?;
    let pt = d_c_seq_point(w0, w1, q, s)?;
    let rem = dmc_remainder(w0.len(), q.p_min());
    Ok(DisjunctionBound {
        rhs0: pt.value - s * pt.d1 + rem,
        rhs1: pt.value + (1.0 - s) * pt.d1 + rem,
        s,
    })
}

/// The same disjunction written through the four KL divergences between
/// the tilted law and the channel rows, with `a` positions of type (0,1)
/// and `b` of type (1,0).
///
/// `a` and `b` may be fractional; this is how the interpolated variant with
/// `a = l`, `b = n - l` is evaluated.
pub fn count_bounds(
    a: f64,
    b: f64,
    n: usize,
    q: &BinaryInputChannel,
    s: f64,
) -> Result<DisjunctionBound> {
    check_closed(s)?;
    if a < 0.0 || b < 0.0 || a + b > n as f64 + 1e-12 {
        return Err(Error::CountOverflow { a, b, n });
    }
    let rem = dmc_remainder(n, q.p_min());
    if a == 0.0 && b == 0.0 {
        return Ok(DisjunctionBound {
            rhs0: rem,
            rhs1: rem,
            s,
        });
    }
    let kl = TiltedKl::new(q, s)?;
    Ok(DisjunctionBound {
        rhs0: a * kl.s_to_0 + b * kl.mirror_to_1 + rem,
        rhs1: a * kl.s_to_1 + b * kl.mirror_to_0 + rem,
        s,
    })
}

/// Integer form of [`count_bounds`].
pub fn position_count_bounds(
    n01: usize,
    n10: usize,
    n: usize,
    q: &BinaryInputChannel,
    s: f64,
) -> Result<DisjunctionBound> {
    if n01 + n10 > n {
        return Err(Error::CountOverflow {
            a: n01 as f64,
            b: n10 as f64,
            n,
        });
    }
    count_bounds(n01 as f64, n10 as f64, n, q, s)
}

/// `count_bounds` with `l` positions weighted like (0,1) and `n - l` like
/// (1,0).
pub fn interpolated_count_bounds(
    ell: f64,
    n: usize,
    q: &BinaryInputChannel,
    s: f64,
) -> Result<DisjunctionBound> {
    if !(0.0..=n as f64).contains(&ell) {
        return Err(Error::CountOverflow {
            a: ell,
            b: n as f64 - ell,
            n,
        });
    }
    count_bounds(ell, n as f64 - ell, n, q, s)
}

/// `KL(Q_s || Q_0)`, `KL(Q_s || Q_1)`, `KL(Q_{1-s} || Q_0)`,
/// `KL(Q_{1-s} || Q_1)` for a channel's rows.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TiltedKl {
    pub s_to_0: f64,
    pub s_to_1: f64,
    pub mirror_to_0: f64,
    pub mirror_to_1: f64,
}

impl TiltedKl {
    pub fn new(q: &BinaryInputChannel, s: f64) -> Result<Self> {
        let curve = q.chernoff_curve()?;
        let at = curve.tilted(s);
        let mirror = curve.tilted(1.0 - s);
        let kl = |t: &[f64], r: &[f64]| crate::chernoff::kl(t, r);
        Ok(Self {
            s_to_0: kl(&at.weights, q.row(0))?,
            s_to_1: kl(&at.weights, q.row(1))?,
            mirror_to_0: kl(&mirror.weights, q.row(0))?,
            mirror_to_1: kl(&mirror.weights, q.row(1))?,
        })
    }
}

/// Upper bound on `-ln(pe0 + pe1)` for codewords `w0`, `w1` over `q` and
/// any decision regions: the peak of the tensorized Chernoff curve plus the
/// DMC remainder.
pub fn corollary1_bound(w0: &Codeword, w1: &Codeword, q: &BinaryInputChannel) -> Result<f64> {
    // validates lengths and supports once up front
    d_c_seq_point(w0, w1, q, 0.5)?;
    let (_, peak) = maximize_concave(|s| {
        d_c_seq_point(w0, w1, q, s).expect("validated above")
    });
    Ok(peak + dmc_remainder(w0.len(), q.p_min()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::one_hop_exponent;

    fn bsc(p: f64) -> BinaryInputChannel {
        BinaryInputChannel::bsc(p).unwrap()
    }

    fn w(s: &str) -> Codeword {
        s.parse().unwrap()
    }

    #[test]
    fn converse_bound_arithmetic() {
        let v = theorem3_rhs(100, 0.223_144, 0.1);
        let expected = 22.3144 + (200f64.sqrt() + 4.0) * 10f64.ln() + 8f64.ln();
        assert!((v - expected).abs() < 1e-12);
        assert!((v - 66.16).abs() < 0.01);
    }

    #[test]
    fn converse_bound_is_increasing_and_linear_in_the_limit() {
        let p = bsc(0.1);
        let q = bsc(0.2);
        let e_star = two_hop_exponent(&p, &q).unwrap().e_star;
        let mut prev = theorem3_bound(1, &p, &q).unwrap();
        let one = e_star + (2f64.sqrt() + 4.0) * 10f64.ln() + 8f64.ln();
        assert!((prev - one).abs() < 1e-12);
        for n in 2..200 {
            let b = theorem3_bound(n, &p, &q).unwrap();
            assert!(b > prev);
            prev = b;
        }
        let big = theorem3_bound(1_000_000, &p, &q).unwrap() / 1e6;
        assert!((big - e_star).abs() < 1e-2);
    }

    #[test]
    fn converse_bound_rejects_separable_pair() {
        assert_eq!(
            theorem3_bound(5, &BinaryInputChannel::noiseless(), &bsc(0.2)),
            Err(Error::DegeneratePair)
        );
    }

    #[test]
    fn pairwise_identical_distributions() {
        let p = [0.3, 0.7];
        let b = pairwise_test_bounds(&p, &p, 0.4).unwrap();
        assert!((b.rhs0 - ln4()).abs() < 1e-15);
        assert!((b.rhs1 - ln4()).abs() < 1e-15);
    }

    #[test]
    fn pairwise_symmetric_pair_at_half() {
        let c = bsc(0.1);
        let b = pairwise_test_bounds(c.row(0), c.row(1), 0.5).unwrap();
        let pt = crate::chernoff::d_c_derivatives(c.row(0), c.row(1), 0.5).unwrap();
        let expected = pt.value + 0.5 * (-2.0 * pt.d2).sqrt() + ln4();
        assert!((b.rhs0 - expected).abs() < 1e-14);
        assert!((b.rhs1 - expected).abs() < 1e-14);
    }

    #[test]
    fn pairwise_exhaustive_binary_rules() {
        // the four deterministic rules on a binary outcome: D1 = {}, {0}, {1}, {0,1}
        let c = bsc(0.1);
        let (pi, pi_prime) = (c.row(0), c.row(1));
        for rule in 0u8..4 {
            let in_d1 = |z: usize| (rule >> z) & 1 == 1;
            let pe1: f64 = (0..2).filter(|&z| in_d1(z)).map(|z| pi[z]).sum();
            let pe0: f64 = (0..2).filter(|&z| !in_d1(z)).map(|z| pi_prime[z]).sum();
            for k in 1..10 {
                let s = k as f64 / 10.0;
                let b = pairwise_test_bounds(pi, pi_prime, s).unwrap();
                assert!(b.holds(pe0, pe1), "rule {rule}, s {s}");
            }
        }
    }

    #[test]
    fn dmc_pair_examples() {
        let c = bsc(0.1);
        let b = dmc_pair_bounds(&w("0101"), &w("0101"), &c, 0.3).unwrap();
        let rem = 8f64.sqrt() * 10f64.ln() + ln4();
        assert!((b.rhs0 - rem).abs() < 1e-14 && (b.rhs1 - rem).abs() < 1e-14);

        let b = dmc_pair_bounds(&w("00"), &w("11"), &c, 0.5).unwrap();
        let expected = 2.0 * -(0.6f64).ln() + 2.0 * 10f64.ln() + ln4();
        assert!((b.rhs0 - expected).abs() < 1e-13);
        assert!((b.rhs1 - expected).abs() < 1e-13);

        assert_eq!(
            dmc_pair_bounds(&w("0"), &w("01"), &c, 0.5),
            Err(Error::LengthMismatch(1, 2))
        );
    }

    #[test]
    fn count_bounds_match_codeword_form() {
        let c = bsc(0.1);
        let direct = dmc_pair_bounds(&w("0011"), &w("1101"), &c, 0.3).unwrap();
        let counted = position_count_bounds(2, 1, 4, &c, 0.3).unwrap();
        assert!((direct.rhs0 - counted.rhs0).abs() < 1e-12);
        assert!((direct.rhs1 - counted.rhs1).abs() < 1e-12);

        let zero = position_count_bounds(0, 0, 4, &c, 0.3).unwrap();
        assert_eq!(zero.rhs0, dmc_remainder(4, 0.1));
        assert_eq!(zero.rhs1, dmc_remainder(4, 0.1));

        assert!(matches!(
            position_count_bounds(3, 2, 4, &c, 0.3),
            Err(Error::CountOverflow { .. })
        ));
        assert!(interpolated_count_bounds(4.5, 4, &c, 0.3).is_err());
    }

    #[test]
    fn interpolated_counts_are_linear_in_ell() {
        let c = BinaryInputChannel::z_channel(0.4).unwrap();
        let lo = interpolated_count_bounds(1.0, 5, &c, 0.3).unwrap();
        let hi = interpolated_count_bounds(2.0, 5, &c, 0.3).unwrap();
        let mid = interpolated_count_bounds(1.5, 5, &c, 0.3).unwrap();
        assert!((mid.rhs0 - 0.5 * (lo.rhs0 + hi.rhs0)).abs() < 1e-12);
        assert!((mid.rhs1 - 0.5 * (lo.rhs1 + hi.rhs1)).abs() < 1e-12);
    }

    #[test]
    fn max_over_s_bound_examples() {
        let c = bsc(0.1);
        let same = corollary1_bound(&w("010"), &w("010"), &c).unwrap();
        assert!((same - dmc_remainder(3, 0.1)).abs() < 1e-15);
        assert!(same >= 0.0);

        let c = bsc(0.2);
        let v = corollary1_bound(&w("0"), &w("1"), &c).unwrap();
        let expected = -(0.8f64).ln() + 2f64.sqrt() * 5f64.ln() + ln4();
        assert!((v - expected).abs() < 1e-12);
        // MAP on one use of BSC(0.2): pe0 = pe1 = 0.2
        assert!(-(0.4f64).ln() <= v);
        assert!((v - (one_hop_exponent(&c).value.as_f64() + dmc_remainder(1, 0.2))).abs() < 1e-12);
    }
}
