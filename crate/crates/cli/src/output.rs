//! Number formatting and the hashing output sink.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::CliResult;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

/// Formats a number for CSV output: 12 significant digits, no exponent for
/// ordinary magnitudes, `unbounded` for infinity.
pub fn fmt_number(x: f64) -> String {
    if x == f64::INFINITY {
        return "unbounded".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    let r = round_sig(x);
    if r == 0.0 || (1e-6..1e15).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

/// Rounds every float in a JSON tree.
pub fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(round_sig(x)) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

pub fn to_rounded_value(x: &impl Serialize) -> Value {
    let mut v = serde_json::to_value(x).expect("output types serialize");
    round_value(&mut v);
    v
}

/// Nats to bits, keeping `"unbounded"` and other strings as they are.
pub fn nats_to_bits(v: &Value) -> Value {
    match v {
        Value::Number(n) => n
            .as_f64()
            .and_then(|x| serde_json::Number::from_f64(round_sig(x / std::f64::consts::LN_2)))
            .map_or(Value::Null, Value::Number),
        other => other.clone(),
    }
}

/// Copies `(from, to)` keys of `source` into a `bits` object converted
/// from nats.
pub fn bits_view(source: &Value, keys: &[(&str, &str)]) -> Value {
    let mut out = serde_json::Map::new();
    for &(from, to) in keys {
        if let Some(v) = source.get(from) {
            out.insert(to.to_owned(), nats_to_bits(v));
        }
    }
    Value::Object(out)
}

/// A writer that records the SHA-256 and length of everything written.
pub struct HashingWriter<W: Write> {
    inner: W,
    hasher: Sha256,
    bytes: u64,
}

impl<W: Write> HashingWriter<W> {
    pub fn new(inner: W) -> Self {
        Self {
            inner,
            hasher: Sha256::new(),
            bytes: 0,
        }
    }

    pub fn finish(mut self) -> io::Result<(String, u64)> {
        self.inner.flush()?;
        Ok((hex::encode(self.hasher.finalize()), self.bytes))
    }
}

impl<W: Write> Write for HashingWriter<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.hasher.update(&buf[..n]);
        self.bytes += n as u64;
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

pub fn write_json_line(out: &mut dyn Write, v: &Value) -> CliResult<()> {
    serde_json::to_writer(&mut *out, v).map_err(io::Error::from)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn write_json_pretty(out: &mut dyn Write, v: &Value) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *out, v).map_err(io::Error::from)?;
    out.write_all(b"\n")?;
    Ok(())
}
