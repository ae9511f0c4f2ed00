//! Plain-text signal files: an optional `fs=<rate>` header line followed by
//! one decimal sample per line.
//!
//! Samples are written with 17 significant digits, which round-trips every
//! `f64` exactly.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::types::SignalVector;

/// Parses signal text. `fs_override` takes precedence over the header.
pub fn parse_signal(text: &str, fs_override: Option<f64>) -> Result<SignalVector> {
    let mut header_fs = None;
    let mut samples = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(value) = line.strip_prefix("fs=") {
            if n != 0 || header_fs.is_some() {
                return Err(Error::InvalidData(format!("line {}: header only allowed on the first line", n + 1)));
            }
            let fs: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::InvalidData(format!("line 1: bad sampling rate '{value}'")))?;
            header_fs = Some(fs);
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| Error::InvalidData(format!("line {}: '{line}' is not a number", n + 1)))?;
        if !v.is_finite() {
            return Err(Error::InvalidData(format!("line {}: sample {v} is not finite", n + 1)));
        }
        samples.push(v);
    }
    if samples.is_empty() {
        return Err(Error::InvalidData("signal file contains no samples".into()));
    }
    let fs = fs_override
        .or(header_fs)
        .ok_or_else(|| Error::Usage("no sampling rate: add an fs= header or pass --fs".into()))?;
    if !(fs.is_finite() && fs > 0.0) {
        return Err(Error::InvalidData(format!("sampling rate {fs} is not positive")));
    }
    SignalVector::new(samples, fs)
}

pub fn format_signal(x: &SignalVector) -> String {
    let mut out = String::with_capacity(24 * (x.len() + 1));
    out.push_str(&format!("fs={}\n", x.fs_hz()));
    for v in x.samples() {
        out.push_str(&format!("{v:.16e}\n"));
    }
    out
}

pub fn read_signal(path: &Path, fs_override: Option<f64>) -> Result<SignalVector> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidData(format!("cannot read {}: {e}", path.display())))?;
    parse_signal(&text, fs_override)
}

pub fn write_signal(path: &Path, x: &SignalVector) -> Result<()> {
    write_text(path, &format_signal(x))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Internal(format!("cannot write {}: {e}", path.display())))
}
