use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("channel matrix must have exactly 2 rows, got {0}")]
    WrongRowCount(usize),

    #[error("channel needs at least 2 outputs, got {0}")]
    TooFewOutputs(usize),

    #[error("rows have different lengths: {0} vs {1}")]
    RaggedRows(usize, usize),

    #[error("entry [{row}][{col}] = {value} is negative or not finite")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("row {row} sums to {sum}, not within 1e-9 of 1")]
    RowSumOutOfTolerance { row: usize, sum: f64 },

    #[error("parameter {name} = {value} is outside {range}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("distributions have different alphabet sizes: {0} vs {1}")]
    AlphabetMismatch(usize, usize),

    #[error("distributions have disjoint supports")]
    DisjointSupport,

    #[error("distributions have disjoint supports at position {0}")]
    DisjointSupportAt(usize),

    #[error("derivative requested at endpoint s = {0}; only defined on (0, 1)")]
    EndpointDerivative(f64),

    #[error("KL divergence undefined: q[{index}] = 0 but p[{index}] > 0")]
    AbsoluteContinuityViolation { index: usize },

    #[error("sequences have different lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("invalid bit string {0:?}: only '0' and '1' are allowed")]
    InvalidBits(String),

    #[error("both channels separate their inputs perfectly; the exponent is unbounded")]
    BothDegenerate,

    #[error("a channel with disjoint supports makes the finite-length bound vacuous")]
    DegeneratePair,

    #[error("position counts {a} + {b} exceed blocklength {n}")]
    CountOverflow { a: f64, b: f64, n: usize },

    #[error("enumeration cap exceeded: {what} (limit {limit}, requested {requested})")]
    CapExceeded {
        what: &'static str,
        limit: u128,
        requested: u128,
    },

    #[error("degenerate relay strategy: {0}")]
    DegenerateStrategy(&'static str),

    #[error("run at n = {0} observed no errors; the rate cannot be estimated")]
    ZeroErrorCount(usize),

    #[error("fit needs at least {needed} distinct blocklengths, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
