use serde::{Deserialize, Serialize};

use crate::config::{SimConfig, SweepConfig};
use crate::spec::ChannelSpec;

/// A fully resolved command: everything needed to reproduce its output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Invocation {
    Exponent {
        p: ChannelSpec,
        q: ChannelSpec,
    },
    Bound {
        p: ChannelSpec,
        q: ChannelSpec,
        n: usize,
    },
    Bruteforce {
        p: ChannelSpec,
        q: ChannelSpec,
        n: usize,
        override_cap: bool,
    },
    Simulate {
        config: SimConfig,
    },
    Sweep {
        config: SweepConfig,
    },
    Curve {
        p: ChannelSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q: Option<ChannelSpec>,
        s_grid: Vec<f64>,
    },
}

impl Invocation {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Exponent { .. } => "exponent",
            Self::Bound { .. } => "bound",
            Self::Bruteforce { .. } => "bruteforce",
            Self::Simulate { .. } => "simulate",
            Self::Sweep { .. } => "sweep",
            Self::Curve { .. } => "curve",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Self::Simulate { config } => Some(config.seed),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputDigest {
    pub sha256: String,
    pub bytes: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Invocation,
    /// Whether values were also reported in bits.
    pub bits: bool,
    pub seed: Option<u64>,
    pub version: String,
    pub wall_time_s: f64,
    pub output: OutputDigest,
    /// Set when the run was interrupted and its output is partial.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub truncated: bool,
}
