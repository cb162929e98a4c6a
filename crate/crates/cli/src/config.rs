//! Config files for `simulate` and `sweep`, and the `--s-grid` syntax.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tandem_core::simulator::RelayStrategy;
use tandem_core::Codeword;

use crate::error::{CliError, CliResult};
use crate::output::round_sig;
use crate::spec::ChannelSpec;

pub const MAX_SWEEP_CELLS: usize = 10_000;
pub const MAX_GRID_POINTS: usize = 1_000_000;

pub fn read_json<T: DeserializeOwned>(path: &Path, field: &str) -> CliResult<T> {
    let body = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(field, format!("{}: {e}", path.display())))?;
    serde_json::from_str(&body).map_err(|e| CliError::input(field, format!("{}: {e}", path.display())))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(usize),
    Many(Vec<usize>),
}

impl OneOrMany {
    pub fn values(&self) -> Vec<usize> {
        match self {
            Self::One(n) => vec![*n],
            Self::Many(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EncoderSpec {
    /// `"repetition"`: all zeros against all ones.
    Named(String),
    Pair { x0: Codeword, x1: Codeword },
}

impl Default for EncoderSpec {
    fn default() -> Self {
        Self::Named("repetition".into())
    }
}

impl EncoderSpec {
    pub fn codewords(&self, n: usize) -> CliResult<(Codeword, Codeword)> {
        match self {
            Self::Named(name) if name == "repetition" => Ok((Codeword::zeros(n), Codeword::ones(n))),
            Self::Named(name) => Err(CliError::input(
                "encoder",
                format!("unknown encoder '{name}' (expected \"repetition\" or {{\"x0\", \"x1\"}})"),
            )),
            Self::Pair { x0, x1 } => {
                if x0.len() != n || x1.len() != n {
                    return Err(CliError::input(
                        "encoder",
                        format!("codewords have lengths {} and {}, n is {n}", x0.len(), x1.len()),
                    ));
                }
                Ok((x0.clone(), x1.clone()))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub p: ChannelSpec,
    pub q: ChannelSpec,
    pub strategy: RelayStrategy,
    #[serde(default)]
    pub encoder: EncoderSpec,
    pub n: OneOrMany,
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    /// Append an exponent fit over the runs.
    #[serde(default)]
    pub fit: bool,
}

impl SimConfig {
    pub fn validate(&self) -> CliResult<()> {
        if self.n.values().is_empty() {
            return Err(CliError::input("n", "no blocklengths given"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    List(Vec<ChannelSpec>),
    Family {
        family: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        values: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        start: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        stop: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        step: Option<f64>,
    },
}

impl Axis {
    pub fn expand(&self, field: &str) -> CliResult<Vec<ChannelSpec>> {
        match self {
            Self::List(v) => Ok(v.clone()),
            Self::Family {
                family,
                values,
                start,
                stop,
                step,
            } => {
                let values = match (values, start, stop, step) {
                    (Some(v), None, None, None) => v.clone(),
                    (None, Some(a), Some(b), Some(h)) => range(*a, *b, *h, field)?,
                    _ => {
                        return Err(CliError::input(
                            field,
                            "give either \"values\" or all of \"start\", \"stop\", \"step\"",
                        ))
                    }
                };
                values
                    .into_iter()
                    .map(|v| match family.as_str() {
                        "bsc" => Ok(ChannelSpec::Bsc { bsc: v }),
                        "z" => Ok(ChannelSpec::Z { z: v }),
                        "bec" => Ok(ChannelSpec::Bec { bec: v }),
                        other => Err(CliError::input(
                            field,
                            format!("unknown family '{other}' (expected bsc, z or bec)"),
                        )),
                    })
                    .collect()
            }
        }
    }
}

fn range(start: f64, stop: f64, step: f64, field: &str) -> CliResult<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || !start.is_finite() || !stop.is_finite() {
        return Err(CliError::input(field, "range needs finite bounds and a positive step"));
    }
    let count = ((stop - start) / step + 1e-9).floor();
    if count < 0.0 {
        return Ok(Vec::new());
    }
    if count >= MAX_GRID_POINTS as f64 {
        return Err(CliError::Cap(format!("{field}: range has more than {MAX_GRID_POINTS} points")));
    }
    Ok((0..=count as usize)
        .map(|k| round_sig(start + k as f64 * step))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub p: Axis,
    pub q: Axis,
}

/// Parses `start:stop:step` (inclusive) or a comma-separated list of values
/// in `[0, 1]`.
pub fn parse_s_grid(text: &str) -> CliResult<Vec<f64>> {
    let field = "--s-grid";
    let num = |t: &str| -> CliResult<f64> {
        t.trim()
            .parse()
            .map_err(|_| CliError::input(field, format!("'{t}' is not a number")))
    };
    let grid = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::input(field, "expected start:stop:step"));
        }
        range(num(parts[0])?, num(parts[1])?, num(parts[2])?, field)?
    } else {
        text.split(',').map(num).collect::<CliResult<Vec<_>>>()?
    };
    if grid.is_empty() {
        return Err(CliError::input(field, "grid is empty"));
    }
    if let Some(bad) = grid.iter().find(|s| !(0.0..=1.0).contains(*s)) {
        return Err(CliError::input(field, format!("{bad} is outside [0, 1]")));
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_syntax() {
        assert_eq!(parse_s_grid("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_s_grid("0.1, 0.3").unwrap(), vec![0.1, 0.3]);
        assert_eq!(parse_s_grid("0:1:0.1").unwrap().len(), 11);
        assert!(parse_s_grid("0.5:0.1:0.1").is_err());
        assert!(parse_s_grid("0:2:1").is_err());
        assert!(parse_s_grid("a").is_err());
    }

    #[test]
    fn family_range_is_clean() {
        let axis: Axis =
            serde_json::from_str(r#"{"family": "bsc", "start": 0.05, "stop": 0.45, "step": 0.05}"#)
                .unwrap();
        let specs = axis.expand("p").unwrap();
        assert_eq!(specs.len(), 9);
        assert_eq!(specs[2], ChannelSpec::Bsc { bsc: 0.15 });
    }

    #[test]
    fn sim_config_parses() {
        let c: SimConfig = serde_json::from_str(
            r#"{"p": "bsc:0.1", "q": {"bsc": 0.2}, "strategy": {"kind": "BestGuessSoFar"},
                "n": [10, 20], "trials": 1000, "seed": 3}"#,
        )
        .unwrap();
        assert_eq!(c.n.values(), vec![10, 20]);
        assert_eq!(c.encoder, EncoderSpec::default());
    }
}
