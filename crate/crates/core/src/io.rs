//! Key file formats: text (one i64 per line) and bin (little-endian i64s).
//! Tags are never written.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Text,
    Bin,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Format::Text),
            "bin" => Ok(Format::Bin),
            _ => Err(format!("unknown format `{s}` (expected text or bin)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Text => "text",
            Format::Bin => "bin",
        })
    }
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("line {line}: cannot parse `{text}` as i64")]
    Parse { line: usize, text: String },
    #[error("binary input of {0} bytes is not a multiple of 8")]
    Truncated(usize),
}

pub fn parse_text(s: &str) -> Result<Vec<i64>, IoError> {
    s.lines()
        .enumerate()
        .map(|(i, l)| {
            l.trim().parse::<i64>().map_err(|_| IoError::Parse {
                line: i + 1,
                text: l.to_string(),
            })
        })
        .collect()
}

pub fn format_text(keys: &[i64]) -> String {
    let mut s = String::with_capacity(keys.len() * 8);
    for k in keys {
        s.push_str(&k.to_string());
        s.push('\n');
    }
    s
}

pub fn parse_bin(bytes: &[u8]) -> Result<Vec<i64>, IoError> {
    if bytes.len() % 8 != 0 {
        return Err(IoError::Truncated(bytes.len()));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| i64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect())
}

pub fn format_bin(keys: &[i64]) -> Vec<u8> {
    keys.iter().flat_map(|k| k.to_le_bytes()).collect()
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> IoError + '_ {
    move |source| IoError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn read_keys(path: &Path, format: Format) -> Result<Vec<i64>, IoError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    match format {
        Format::Bin => parse_bin(&bytes),
        Format::Text => parse_text(&String::from_utf8_lossy(&bytes)),
    }
}

pub fn write_keys(path: &Path, keys: &[i64], format: Format) -> Result<(), IoError> {
    let bytes = match format {
        Format::Text => format_text(keys).into_bytes(),
        Format::Bin => format_bin(keys),
    };
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    f.write_all(&bytes).map_err(io_err(path))
}
