//! Matrix files.
//!
//! * CSV: headerless, comma-separated, one row per line.
//! * Binary: `"ASKM"`, version `u32 = 1`, rows `u64`, cols `u64`, then
//!   `rows × cols` IEEE-754 doubles in row-major order. Everything is
//!   little-endian.

use super::DenseMatrix;
use crate::error::{Error, ParseLocation, Result};
use std::fmt::Write as _;
use std::path::Path;

pub const BINARY_MAGIC: &[u8; 4] = b"ASKM";
pub const BINARY_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 8 + 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixFormat {
    Csv,
    Binary,
}

impl MatrixFormat {
    /// Guesses the format from a file extension (`.csv` or anything else).
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => MatrixFormat::Csv,
            _ => MatrixFormat::Binary,
        }
    }
}

pub fn encode_binary(a: &DenseMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * a.rows() * a.cols());
    out.extend_from_slice(BINARY_MAGIC);
    out.extend_from_slice(&BINARY_VERSION.to_le_bytes());
    out.extend_from_slice(&(a.rows() as u64).to_le_bytes());
    out.extend_from_slice(&(a.cols() as u64).to_le_bytes());
    for v in a.to_row_major() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_binary(bytes: &[u8]) -> Result<DenseMatrix> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::parse(
            ParseLocation::Byte(bytes.len()),
            format!("truncated header: {} of {HEADER_LEN} bytes", bytes.len()),
        ));
    }
    if &bytes[0..4] != BINARY_MAGIC {
        return Err(Error::parse(ParseLocation::Byte(0), "bad magic bytes"));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != BINARY_VERSION {
        return Err(Error::parse(
            ParseLocation::Byte(4),
            format!("unsupported version {version}"),
        ));
    }
    let rows = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    let cols = u64::from_le_bytes(bytes[16..24].try_into().unwrap());
    let count = rows
        .checked_mul(cols)
        .and_then(|c| usize::try_from(c).ok())
        .filter(|c| c.checked_mul(8).is_some())
        .ok_or_else(|| Error::parse(ParseLocation::Byte(8), "matrix dimensions overflow"))?;
    let expected = HEADER_LEN + 8 * count;
    if bytes.len() != expected {
        return Err(Error::parse(
            ParseLocation::Byte(bytes.len().min(expected)),
            format!("payload length mismatch: expected {expected} bytes, found {}", bytes.len()),
        ));
    }
    let mut entries = Vec::with_capacity(count);
    for k in 0..count {
        let at = HEADER_LEN + 8 * k;
        let v = f64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
        if !v.is_finite() {
            return Err(Error::parse(ParseLocation::Byte(at), "non-finite entry"));
        }
        entries.push(v);
    }
    DenseMatrix::from_row_major(rows as usize, cols as usize, entries)
}

/// Shortest round-trip decimal representation of every entry.
pub fn write_csv(a: &DenseMatrix) -> String {
    let mut out = String::new();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{:?}", a.get(i, j)).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn parse_csv(text: &str) -> Result<DenseMatrix> {
    let mut entries = Vec::new();
    let mut cols: Option<usize> = None;
    let mut rows = 0;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let before = entries.len();
        for field in line.split(',') {
            let field = field.trim();
            let v: f64 = field.parse().map_err(|_| {
                Error::parse(ParseLocation::Line(line_no), format!("cannot parse {field:?} as a number"))
            })?;
            if !v.is_finite() {
                return Err(Error::parse(ParseLocation::Line(line_no), "non-finite entry"));
            }
            entries.push(v);
        }
        let width = entries.len() - before;
        match cols {
            None => cols = Some(width),
            Some(c) if c != width => {
                return Err(Error::parse(
                    ParseLocation::Line(line_no),
                    format!("expected {c} fields, found {width}"),
                ))
            }
            _ => {}
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| Error::parse(ParseLocation::Line(1), "empty input"))?;
    DenseMatrix::from_row_major(rows, cols, entries)
}

pub fn save_matrix(a: &DenseMatrix, path: impl AsRef<Path>, format: MatrixFormat) -> Result<()> {
    match format {
        MatrixFormat::Csv => std::fs::write(path, write_csv(a))?,
        MatrixFormat::Binary => std::fs::write(path, encode_binary(a))?,
    }
    Ok(())
}

/// Loads either format; binary files are recognised by their magic bytes.
pub fn load_matrix(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let bytes = std::fs::read(path)?;
    if bytes.starts_with(BINARY_MAGIC) {
        return decode_binary(&bytes);
    }
    let text = std::str::from_utf8(&bytes).map_err(|e| {
        Error::parse(ParseLocation::Byte(e.valid_up_to()), "neither a binary matrix nor UTF-8 text")
    })?;
    parse_csv(text)
}
