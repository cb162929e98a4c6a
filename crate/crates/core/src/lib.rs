//! Error exponents for relaying a single bit across a tandem of two
//! binary-input discrete memoryless channels.
//!
//! The crate computes the optimal two-hop exponent and its maximizing tilt,
//! evaluates finite-blocklength converse bounds, and checks both against an
//! exhaustive protocol oracle at tiny blocklengths and a Monte Carlo
//! simulator of baseline relay strategies at moderate blocklengths.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`channel`] | binary-input channels, codewords |
//! | [`chernoff`] | Chernoff divergence, derivatives, tilted laws, KL |
//! | [`exponent`] | one-hop and two-hop exponents, type classification |
//! | [`bounds`] | converse bounds and hypothesis-test disjunctions |
//! | [`bruteforce`] | exact optimal protocols for small `n` |
//! | [`simulator`] | Monte Carlo relay simulation and exponent fits |
//!
//! All quantities are in nats.

pub mod bounds;
pub mod bruteforce;
pub mod channel;
pub mod chernoff;
pub mod error;
pub mod exponent;
pub mod numeric;
pub mod simulator;

pub use channel::{joint_p_min, BinaryInputChannel, Codeword, SupportKind, SupportRelation};
pub use chernoff::{
    d_c, d_c_derivatives, d_c_seq, d_c_seq_point, kl, tilt, tilt_seq, ChernoffCurve,
    ChernoffCurvePoint, TiltedDistribution,
};
pub use error::{Error, Result};
pub use exponent::{
    classify_type, e_s, one_hop_exponent, trivial_converse, two_hop_exponent, Exponent,
    ExponentReport, OneHopExponent, Regime, TypeClass, TypeKind,
};
pub use bounds::{
    corollary1_bound, count_bounds, dmc_pair_bounds, pairwise_test_bounds, theorem3_bound,
    DisjunctionBound, TiltedKl,
};
pub use bruteforce::{
    certify_theorem3, check_prefix_chaining, exact_error, optimal_protocol, CertificationReport,
    ExactErrorTable, ProtocolOracle, ProtocolTable, RelayMap,
};
pub use simulator::{exponent_fit, simulate, ExponentFit, RelayStrategy, SimResult};
