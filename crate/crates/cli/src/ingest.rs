//! Reading and writing sample files.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use holderscope::sampled::{BoundaryMode, SampledSignal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// One float per line, optional `# n=<int>` header.
    Csv,
    /// Little-endian 64-bit floats, no header.
    Raw,
}

impl Format {
    /// `.csv` and `.txt` read as CSV, anything else as raw.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") || e.eq_ignore_ascii_case("txt") => Format::Csv,
            _ => Format::Raw,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Raw => "raw",
        }
    }
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "raw" | "bin" | "binary" => Ok(Format::Raw),
            _ => Err(invalid!("unknown format `{s}` (expected csv or raw)")),
        }
    }
}

pub fn ingest(path: &Path, format: Format) -> Result<SampledSignal<f64>> {
    let values = match format {
        Format::Csv => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            parse_csv(&text)?
        }
        Format::Raw => {
            let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
            parse_raw(&bytes)?
        }
    };
    to_signal(values)
}

fn parse_csv(text: &str) -> Result<Vec<f64>> {
    let mut declared = None;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(n) = comment.trim().strip_prefix("n=") {
                if !values.is_empty() {
                    return Err(invalid!("line {lineno}: `# n=` header after the first sample"));
                }
                let n: u32 = n
                    .trim()
                    .parse()
                    .map_err(|_| invalid!("line {lineno}: cannot parse header `{line}`"))?;
                declared = Some(n);
            }
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| invalid!("line {lineno}: cannot parse `{line}` as a number"))?;
        if !v.is_finite() {
            return Err(invalid!(
                "line {lineno}: sample {} is not finite ({v})",
                values.len()
            ));
        }
        values.push(v);
    }
    if let Some(n) = declared {
        let want = 1usize.checked_shl(n).filter(|_| n < 63);
        if want != Some(values.len()) {
            return Err(invalid!(
                "header declares n={n} but the file holds {} samples",
                values.len()
            ));
        }
    }
    Ok(values)
}

fn parse_raw(bytes: &[u8]) -> Result<Vec<f64>> {
    if !bytes.len().is_multiple_of(8) {
        return Err(invalid!(
            "raw input of {} bytes is not a whole number of 64-bit floats",
            bytes.len()
        ));
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(invalid!("sample {i} is not finite ({})", values[i]));
    }
    Ok(values)
}

fn to_signal(values: Vec<f64>) -> Result<SampledSignal<f64>> {
    if !values.len().is_power_of_two() || values.len() < 2 {
        return Err(invalid!("length {} is not a power of two", values.len()));
    }
    Ok(SampledSignal::new(values, BoundaryMode::Periodic)?)
}

pub fn write_samples(path: &Path, f: &SampledSignal<f64>, format: Format) -> Result<()> {
    let bytes = match format {
        Format::Csv => {
            let mut out = format!("# n={}\n", f.n()).into_bytes();
            for v in f.values() {
                writeln!(out, "{v:.16e}").expect("write to memory");
            }
            out
        }
        Format::Raw => f.values().iter().flat_map(|v| v.to_le_bytes()).collect(),
    };
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}
