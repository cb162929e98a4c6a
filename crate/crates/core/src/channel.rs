//! Binary-input discrete memoryless channels.
//!
//! A channel is a 2 x m row-stochastic matrix: row `b` is the output
//! distribution when input `b` is sent. Zero entries are legal and are kept
//! exactly, since the support structure decides both the endpoint limits of
//! the Chernoff curve and the degenerate (perfectly separable) case.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ingest tolerance on row sums.
pub const INGEST_TOLERANCE: f64 = 1e-9;
/// Rows within this distance of 1 are stored untouched.
pub const STORED_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChannel", into = "RawChannel")]
pub struct BinaryInputChannel {
    rows: [Vec<f64>; 2],
    label: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawChannel {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    rows: Vec<Vec<f64>>,
}

impl TryFrom<RawChannel> for BinaryInputChannel {
    type Error = Error;

    fn try_from(raw: RawChannel) -> Result<Self> {
        let mut c = Self::validate(&raw.rows)?;
        c.label = raw.name;
        Ok(c)
    }
}

impl From<BinaryInputChannel> for RawChannel {
    fn from(c: BinaryInputChannel) -> Self {
        RawChannel {
            rows: c.to_raw(),
            name: c.label,
        }
    }
}

/// Whether the two rows share any output symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SupportKind {
    Overlapping,
    Disjoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportRelation {
    pub kind: SupportKind,
    /// First output index where both rows are strictly positive.
    pub witness: Option<usize>,
}

impl SupportRelation {
    pub fn is_disjoint(&self) -> bool {
        self.kind == SupportKind::Disjoint
    }
}

impl BinaryInputChannel {
    /// Checks and normalizes a raw 2 x m matrix.
    ///
    /// Rows whose sum is within 1e-9 of one are rescaled to sum to one; rows
    /// further off are rejected rather than silently repaired.
    pub fn validate(raw: &[Vec<f64>]) -> Result<Self> {
        if raw.len() != 2 {
            return Err(Error::WrongRowCount(raw.len()));
        }
        let m = raw[0].len();
        if raw[1].len() != m {
            return Err(Error::RaggedRows(m, raw[1].len()));
        }
        if m < 2 {
            return Err(Error::TooFewOutputs(m));
        }
        let mut rows = [Vec::with_capacity(m), Vec::with_capacity(m)];
        for (r, row) in raw.iter().enumerate() {
            for (col, &value) in row.iter().enumerate() {
                if !(value.is_finite() && value >= 0.0) {
                    return Err(Error::NegativeEntry { row: r, col, value });
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > INGEST_TOLERANCE {
                return Err(Error::RowSumOutOfTolerance { row: r, sum });
            }
            rows[r] = if (sum - 1.0).abs() <= STORED_TOLERANCE {
                row.clone()
            } else {
                row.iter().map(|v| v / sum).collect()
            };
        }
        Ok(Self { rows, label: None })
    }

    pub fn from_rows(row0: Vec<f64>, row1: Vec<f64>) -> Result<Self> {
        Self::validate(&[row0, row1])
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        check_probability("p", p)?;
        Ok(Self::validate(&[vec![1.0 - p, p], vec![p, 1.0 - p]])?.with_label(format!("bsc:{p}")))
    }

    /// Z-channel: input 0 is received noiselessly, input 1 flips to 0 with
    /// probability `q`.
    pub fn z_channel(q: f64) -> Result<Self> {
        check_probability("q", q)?;
        Ok(Self::validate(&[vec![1.0, 0.0], vec![q, 1.0 - q]])?.with_label(format!("z:{q}")))
    }

    /// Binary erasure channel with erasure probability `e`; output 2 is the
    /// erasure symbol.
    pub fn bec(e: f64) -> Result<Self> {
        check_probability("e", e)?;
        Ok(
            Self::validate(&[vec![1.0 - e, 0.0, e], vec![0.0, 1.0 - e, e]])?
                .with_label(format!("bec:{e}")),
        )
    }

    pub fn noiseless() -> Self {
        Self {
            rows: [vec![1.0, 0.0], vec![0.0, 1.0]],
            label: Some("noiseless".to_owned()),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// Output distribution for input `bit` (0 or 1).
    pub fn row(&self, bit: u8) -> &[f64] {
        &self.rows[usize::from(bit & 1)]
    }

    pub fn rows(&self) -> &[Vec<f64>; 2] {
        &self.rows
    }

    /// Output alphabet size.
    pub fn outputs(&self) -> usize {
        self.rows[0].len()
    }

    pub fn to_raw(&self) -> Vec<Vec<f64>> {
        self.rows.to_vec()
    }

    /// Smallest strictly positive transition probability.
    pub fn p_min(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .copied()
            .filter(|&v| v > 0.0)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn support_relation(&self) -> SupportRelation {
        let witness = self.rows[0]
            .iter()
            .zip(&self.rows[1])
            .position(|(&a, &b)| a > 0.0 && b > 0.0);
        SupportRelation {
            kind: if witness.is_some() {
                SupportKind::Overlapping
            } else {
                SupportKind::Disjoint
            },
            witness,
        }
    }

    /// Relabels the inputs: row 0 becomes row 1 and vice versa.
    pub fn swap_inputs(&self) -> Self {
        Self {
            rows: [self.rows[1].clone(), self.rows[0].clone()],
            label: self.label.clone(),
        }
    }
}

/// Smallest positive transition probability across two channels.
pub fn joint_p_min(a: &BinaryInputChannel, b: &BinaryInputChannel) -> f64 {
    a.p_min().min(b.p_min())
}

fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            range: "[0, 1]",
        })
    }
}

/// A binary string, stored one bit per byte.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Codeword(Vec<u8>);

impl Codeword {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidBits(format!("{bits:?}")));
        }
        Ok(Self(bits))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![1; n])
    }

    /// The `n`-bit big-endian expansion of `index`.
    pub fn from_index(index: u64, n: usize) -> Self {
        Self((0..n).map(|i| ((index >> (n - 1 - i)) & 1) as u8).collect())
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of positions with `self = a` and `other = b`.
    pub fn count_pairs(&self, other: &Codeword, a: u8, b: u8) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .filter(|&(&x, &y)| x == a && y == b)
            .count()
    }
}

impl FromStr for Codeword {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::InvalidBits(s.to_owned())),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

impl TryFrom<String> for Codeword {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Codeword> for String {
    fn from(c: Codeword) -> Self {
        c.to_string()
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            f.write_str(if *b == 0 { "0" } else { "1" })?;
        }
        Ok(())
    }
}
