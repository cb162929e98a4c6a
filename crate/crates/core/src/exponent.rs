//! One-hop and two-hop error exponents.
//!
//! The one-hop exponent of a binary-input channel is the peak of its
//! Chernoff curve over `s ∈ [0, 1]`. For the tandem encoder -> relay ->
//! decoder over channels `P` then `Q`, the optimal exponent is
//!
//! ```text
//! E* = max_{0 <= s <= 1/2} min( max(d_P(s), d_P(1-s)), max(d_Q(s), d_Q(1-s)) )
//! ```
//!
//! where `d_P`, `d_Q` are the channels' Chernoff curves. The objective is
//! symmetric under `s -> 1 - s`, so the search runs over `[0, 1/2]`.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::channel::BinaryInputChannel;
use crate::chernoff::{ChernoffCurve, ChernoffCurvePoint};
use crate::error::{Error, Result};
use crate::numeric::{bisect_decreasing, golden_section_maximize};

/// Grid size used for the coarse scan of `[0, 1/2]`.
pub const GRID_POINTS: usize = 4097;
/// Final bracket width of the golden-section refinement.
pub const REFINE_WIDTH: f64 = 1e-10;
/// Distance from `s*` or `1 - s*` at which a peak counts as neutral.
pub const NEUTRAL_TOLERANCE: f64 = 1e-9;
/// Agreement tolerance when deciding which regime applies.
pub const REGIME_TOLERANCE: f64 = 1e-8;

/// An exponent in nats, or unbounded when a channel separates its inputs
/// perfectly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Unbounded,
}

impl Exponent {
    /// The exponent as a float, with `Unbounded` mapped to infinity.
    pub fn as_f64(self) -> f64 {
        match self {
            Exponent::Finite(v) => v,
            Exponent::Unbounded => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Exponent::Finite(v) => Some(v),
            Exponent::Unbounded => None,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, Exponent::Unbounded)
    }

    pub fn min(self, other: Exponent) -> Exponent {
        match (self, other) {
            (Exponent::Unbounded, x) | (x, Exponent::Unbounded) => x,
            (Exponent::Finite(a), Exponent::Finite(b)) => Exponent::Finite(a.min(b)),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(v) => write!(f, "{v}"),
            Exponent::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(v) => serializer.serialize_f64(*v),
            Exponent::Unbounded => serializer.serialize_str("unbounded"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ExponentVisitor;

        impl Visitor<'_> for ExponentVisitor {
            type Value = Exponent;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or the string \"unbounded\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Exponent, E> {
                Ok(Exponent::Finite(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Exponent, E> {
                Ok(Exponent::Finite(v as f64))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Exponent, E> {
                Ok(Exponent::Finite(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Exponent, E> {
                if v == "unbounded" {
                    Ok(Exponent::Unbounded)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }

        deserializer.deserialize_any(ExponentVisitor)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneHopExponent {
    pub value: Exponent,
    /// A maximizing `s`. For curves without a unique peak this is the
    /// smallest maximizer, 0.
    pub argmax_s: f64,
    pub unique: bool,
}

/// Maximizes a concave curve over `[0, 1]` from its derivative: endpoints
/// when the slope does not change sign, otherwise the root of the slope.
pub(crate) fn maximize_concave(point: impl Fn(f64) -> ChernoffCurvePoint) -> (f64, f64) {
    let slope = |s: f64| point(s).d1;
    let s = if slope(0.0) <= 0.0 {
        0.0
    } else if slope(1.0) >= 0.0 {
        1.0
    } else {
        bisect_decreasing(slope, 0.0, 1.0)
    };
    (s, point(s).value)
}

/// Maximizes a Chernoff curve over `[0, 1]`.
fn peak(curve: &ChernoffCurve) -> (f64, f64, bool) {
    if curve.is_flat() {
        return (0.0, curve.value(0.0), false);
    }
    let (s, value) = maximize_concave(|s| curve.point(s));
    (s, value, true)
}

/// The best exponent for sending one bit directly over `c`.
pub fn one_hop_exponent(c: &BinaryInputChannel) -> OneHopExponent {
    match c.chernoff_curve() {
        Ok(curve) => {
            let (argmax_s, value, unique) = peak(&curve);
            OneHopExponent {
                value: Exponent::Finite(value),
                argmax_s,
                unique,
            }
        }
        Err(_) => OneHopExponent {
            value: Exponent::Unbounded,
            argmax_s: 0.0,
            unique: false,
        },
    }
}

/// `max(d(s), d(1 - s))` for a channel, infinite for a separable channel.
struct FoldedCurve(Option<ChernoffCurve>);

impl FoldedCurve {
    fn new(c: &BinaryInputChannel) -> Self {
        Self(c.chernoff_curve().ok())
    }

    fn eval(&self, s: f64) -> f64 {
        match &self.0 {
            Some(curve) => curve.value(s).max(curve.value(1.0 - s)),
            None => f64::INFINITY,
        }
    }
}

/// The two-hop objective at `s`.
pub fn e_s(p: &BinaryInputChannel, q: &BinaryInputChannel, s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidParameter {
            name: "s",
            value: s,
            range: "[0, 1]",
        });
    }
    let fp = FoldedCurve(Some(p.chernoff_curve()?));
    let fq = FoldedCurve(Some(q.chernoff_curve()?));
    Ok(fp.eval(s).min(fq.eval(s)))
}

/// Maximizes `objective` over `[0, 1/2]`: uniform grid, then golden-section
/// refinement of the best bracket. Ties go to the smaller `s`.
fn maximize_on_half(objective: impl Fn(f64) -> f64) -> (f64, f64) {
    let step = 0.5 / (GRID_POINTS - 1) as f64;
    let mut best = (0usize, objective(0.0));
    for i in 1..GRID_POINTS {
        let v = objective(i as f64 * step);
        if v > best.1 {
            best = (i, v);
        }
    }
    let (i, grid_value) = best;
    let lo = i.saturating_sub(1) as f64 * step;
    let hi = ((i + 1).min(GRID_POINTS - 1)) as f64 * step;
    let (s, v) = golden_section_maximize(&objective, lo, hi, REFINE_WIDTH);
    if v > grid_value {
        (s, v)
    } else {
        (i as f64 * step, grid_value)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TypeKind {
    Skewed,
    Balanced,
    Neutral,
    NonUniqueMaximum,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeClass {
    pub kind: TypeKind,
    /// Present when the Chernoff curve has a unique peak.
    pub argmax_s: Option<f64>,
}

/// Position of a channel's Chernoff peak relative to `(s*, 1 - s*)`.
pub fn classify_type(c: &BinaryInputChannel, s_star: f64) -> Result<TypeClass> {
    if !(0.0..=0.5).contains(&s_star) {
        return Err(Error::InvalidParameter {
            name: "s_star",
            value: s_star,
            range: "[0, 1/2]",
        });
    }
    let one_hop = one_hop_exponent(c);
    if !one_hop.unique {
        return Ok(TypeClass {
            kind: TypeKind::NonUniqueMaximum,
            argmax_s: None,
        });
    }
    let a = one_hop.argmax_s;
    let (lo, hi) = (s_star, 1.0 - s_star);
    let kind = if (a - lo).abs() <= NEUTRAL_TOLERANCE || (a - hi).abs() <= NEUTRAL_TOLERANCE {
        TypeKind::Neutral
    } else if a < lo || a > hi {
        TypeKind::Skewed
    } else {
        TypeKind::Balanced
    };
    Ok(TypeClass {
        kind,
        argmax_s: Some(a),
    })
}

/// `min(E(P), E(Q))`, the exponent of the weaker hop.
pub fn trivial_converse(p: &BinaryInputChannel, q: &BinaryInputChannel) -> Exponent {
    one_hop_exponent(p).value.min(one_hop_exponent(q).value)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `E*` equals the one-hop exponent of `P`.
    EqualsOneHopP,
    /// `E*` equals the one-hop exponent of `Q`.
    EqualsOneHopQ,
    /// The curves have strictly opposite types and cross at `s*`.
    OppositeType,
}

/// Which channel, if any, was replaced by its perfectly separable shortcut.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reduction {
    /// `P` separates its inputs, so the relay learns the bit exactly.
    PSeparable,
    /// `Q` separates its inputs, so the relay's bits arrive exactly.
    QSeparable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputSwaps {
    pub p: bool,
    pub q: bool,
}

/// Distances to each regime condition. `None` where a one-hop exponent is
/// unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeMargins {
    pub to_one_hop_p: Option<f64>,
    pub to_one_hop_q: Option<f64>,
    /// `|d_P(s*) - d_Q(s*)|` after the input swaps.
    pub crossing: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub e_star: f64,
    pub s_star: f64,
    pub e1_p: Exponent,
    pub e1_q: Exponent,
    pub regime: Regime,
    pub type_p: TypeClass,
    pub type_q: TypeClass,
    pub input_swaps: InputSwaps,
    pub margins: RegimeMargins,
    /// Set when the regime conditions could not single out one label at
    /// the working tolerance.
    pub ambiguous: bool,
    pub reduction: Option<Reduction>,
}

impl ExponentReport {
    /// The regimes whose defining condition holds within tolerance.
    pub fn applicable_regimes(&self) -> Vec<Regime> {
        let mut out = Vec::new();
        let within = |m: Option<f64>| m.is_some_and(|m| m <= REGIME_TOLERANCE);
        if within(self.margins.to_one_hop_p) {
            out.push(Regime::EqualsOneHopP);
        }
        if within(self.margins.to_one_hop_q) {
            out.push(Regime::EqualsOneHopQ);
        }
        if strictly_opposite(self.type_p.kind, self.type_q.kind) && within(self.margins.crossing) {
            out.push(Regime::OppositeType);
        }
        out
    }
}

fn strictly_opposite(a: TypeKind, b: TypeKind) -> bool {
    matches!(
        (a, b),
        (TypeKind::Skewed, TypeKind::Balanced) | (TypeKind::Balanced, TypeKind::Skewed)
    )
}

/// Optimal exponent for relaying one bit over `P` then `Q`, with the
/// maximizing `s`, the regime it falls in and the curve types.
pub fn two_hop_exponent(p: &BinaryInputChannel, q: &BinaryInputChannel) -> Result<ExponentReport> {
    let fp = FoldedCurve::new(p);
    let fq = FoldedCurve::new(q);
    let reduction = match (&fp.0, &fq.0) {
        (None, None) => return Err(Error::BothDegenerate),
        (None, Some(_)) => Some(Reduction::PSeparable),
        (Some(_), None) => Some(Reduction::QSeparable),
        _ => None,
    };

    let (s_star, e_star) = match reduction {
        Some(r) => {
            let other = one_hop_exponent(if r == Reduction::PSeparable { q } else { p });
            let s = other.argmax_s.min(1.0 - other.argmax_s);
            (s, other.value.as_f64())
        }
        None => maximize_on_half(|s| fp.eval(s).min(fq.eval(s))),
    };

    // orient each channel so that its curve is at least as high at s* as at
    // 1 - s*
    let orient = |c: &BinaryInputChannel| -> (BinaryInputChannel, bool) {
        match c.chernoff_curve() {
            Ok(curve) if curve.value(s_star) < curve.value(1.0 - s_star) => (c.swap_inputs(), true),
            _ => (c.clone(), false),
        }
    };
    let (p_or, swap_p) = orient(p);
    let (q_or, swap_q) = orient(q);

    let e1_p = one_hop_exponent(p).value;
    let e1_q = one_hop_exponent(q).value;
    let type_p = classify_type(&p_or, s_star)?;
    let type_q = classify_type(&q_or, s_star)?;

    let crossing = match (p_or.d_c(s_star), q_or.d_c(s_star)) {
        (Ok(a), Ok(b)) => Some((a - b).abs()),
        _ => None,
    };
    let margins = RegimeMargins {
        to_one_hop_p: e1_p.finite().map(|v| (v - e_star).abs()),
        to_one_hop_q: e1_q.finite().map(|v| (v - e_star).abs()),
        crossing,
    };

    let mut report = ExponentReport {
        e_star,
        s_star,
        e1_p,
        e1_q,
        regime: Regime::OppositeType,
        type_p,
        type_q,
        input_swaps: InputSwaps {
            p: swap_p,
            q: swap_q,
        },
        margins,
        ambiguous: false,
        reduction,
    };
    let applicable = report.applicable_regimes();
    report.regime = match reduction {
        Some(Reduction::PSeparable) => Regime::EqualsOneHopQ,
        Some(Reduction::QSeparable) => Regime::EqualsOneHopP,
        None => applicable.first().copied().unwrap_or(Regime::OppositeType),
    };
    report.ambiguous = reduction.is_none() && applicable.len() != 1;
    Ok(report)
}
