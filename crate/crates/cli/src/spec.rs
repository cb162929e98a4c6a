//! Channel specifications as accepted on the command line and in config
//! files.
//!
//! A spec is one of
//!
//! * shorthand text: `bsc:0.1`, `z:0.5`, `bec:0.3`, `noiseless`;
//! * a JSON document `{"name": ..., "rows": [[...], [...]]}`;
//! * a JSON shorthand `{"bsc": p}`, `{"z": q}` or `{"bec": e}`;
//! * a path to a file holding either JSON form.

use std::path::Path;

use serde::{Deserialize, Serialize};
use tandem_core::BinaryInputChannel;

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelSpec {
    Text(String),
    Explicit {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        rows: Vec<Vec<f64>>,
    },
    Bsc {
        bsc: f64,
    },
    Z {
        z: f64,
    },
    Bec {
        bec: f64,
    },
}

fn family(name: &str, value: f64) -> tandem_core::Result<BinaryInputChannel> {
    let c = match name {
        "bsc" => BinaryInputChannel::bsc(value)?,
        "z" => BinaryInputChannel::z_channel(value)?,
        "bec" => BinaryInputChannel::bec(value)?,
        _ => unreachable!(),
    };
    let prefix = match name {
        "bsc" => "BSC",
        "z" => "Z",
        _ => "BEC",
    };
    Ok(c.with_label(format!("{prefix}({value})")))
}

impl ChannelSpec {
    pub fn resolve(&self, field: &str) -> CliResult<BinaryInputChannel> {
        let wrap = |e| CliError::core(field, e);
        match self {
            Self::Text(text) => parse_text(text, field),
            Self::Explicit { name, rows } => {
                let c = BinaryInputChannel::validate(rows).map_err(wrap)?;
                Ok(match name {
                    Some(n) => c.with_label(n.clone()),
                    None => c,
                })
            }
            Self::Bsc { bsc } => family("bsc", *bsc).map_err(wrap),
            Self::Z { z } => family("z", *z).map_err(wrap),
            Self::Bec { bec } => family("bec", *bec).map_err(wrap),
        }
    }
}

fn parse_text(text: &str, field: &str) -> CliResult<BinaryInputChannel> {
    let text = text.trim();
    if text == "noiseless" {
        return Ok(BinaryInputChannel::noiseless().with_label("noiseless"));
    }
    if text.starts_with('{') {
        let spec: ChannelSpec =
            serde_json::from_str(text).map_err(|e| CliError::input(field, e))?;
        return spec.resolve(field);
    }
    if let Some((name, value)) = text.split_once(':') {
        let name = name.to_ascii_lowercase();
        if matches!(name.as_str(), "bsc" | "z" | "bec") {
            let value: f64 = value
                .parse()
                .map_err(|_| CliError::input(field, format!("'{value}' is not a number")))?;
            return family(&name, value).map_err(|e| CliError::core(field, e));
        }
    }
    let path = Path::new(text);
    if path.is_file() {
        let body = std::fs::read_to_string(path)?;
        let spec: ChannelSpec = serde_json::from_str(&body)
            .map_err(|e| CliError::input(field, format!("{}: {e}", path.display())))?;
        if matches!(spec, ChannelSpec::Text(_)) {
            return Err(CliError::input(field, "a spec file must hold a JSON object"));
        }
        return spec.resolve(field);
    }
    Err(CliError::input(
        field,
        format!("'{text}' is not a channel spec (try bsc:0.1, z:0.5, bec:0.3, noiseless, JSON or a file)"),
    ))
}

/// Parses a spec given on the command line and pins it to explicit rows so
/// that a manifest does not depend on files that may later change.
pub fn pin(text: &str, field: &str) -> CliResult<ChannelSpec> {
    let c = parse_text(text, field)?;
    Ok(explicit(&c))
}

pub fn explicit(c: &BinaryInputChannel) -> ChannelSpec {
    ChannelSpec::Explicit {
        name: c.label().map(str::to_owned),
        rows: c.to_raw(),
    }
}
