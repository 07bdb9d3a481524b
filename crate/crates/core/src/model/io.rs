//! Matrix and vector files.
//!
//! Two formats are understood:
//!
//! - CSV: one line per matrix row, comma separated, `.` decimal separator.
//! - Binary: the 4-byte magic `PFW1`, then `rows` and `cols` as little-endian
//!   `u64`, then `rows·cols` little-endian `f64` in row-major order.
//!
//! Readers detect the format from the magic bytes. A vector is any matrix with a
//! single row or a single column.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::matrix::DesignMatrix;
use crate::error::{Error, Result};

pub const BINARY_MAGIC: &[u8; 4] = b"PFW1";

/// Dense row-major table as read from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

pub fn read_table(path: &Path) -> Result<Table> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(BINARY_MAGIC) {
        parse_binary(path, &bytes)
    } else {
        parse_csv(path, &bytes)
    }
}

fn parse_binary(path: &Path, bytes: &[u8]) -> Result<Table> {
    if bytes.len() < 20 {
        return Err(Error::format(path, "truncated binary header"));
    }
    let rows = u64::from_le_bytes(bytes[4..12].try_into().unwrap()) as usize;
    let cols = u64::from_le_bytes(bytes[12..20].try_into().unwrap()) as usize;
    let expected = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(8))
        .ok_or_else(|| Error::format(path, "binary dimensions overflow"))?;
    let body = &bytes[20..];
    if body.len() != expected {
        return Err(Error::format(
            path,
            format!(
                "binary payload has {} bytes, header {rows}x{cols} requires {expected}",
                body.len()
            ),
        ));
    }
    let data = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(Table { rows, cols, data })
}

fn parse_csv(path: &Path, bytes: &[u8]) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(bytes);
    let mut data = Vec::new();
    let mut rows = 0;
    let mut cols = None;
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::format(path, e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        match cols {
            None => cols = Some(record.len()),
            Some(c) if c != record.len() => {
                return Err(Error::format(
                    path,
                    format!("line {}: expected {c} fields, found {}", line + 1, record.len()),
                ))
            }
            _ => {}
        }
        for field in record.iter() {
            let v: f64 = field.parse().map_err(|_| {
                Error::format(path, format!("line {}: not a number: `{field}`", line + 1))
            })?;
            data.push(v);
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| Error::format(path, "empty file"))?;
    Ok(Table { rows, cols, data })
}

pub fn read_matrix(path: &Path) -> Result<DesignMatrix> {
    let t = read_table(path)?;
    DesignMatrix::from_row_major(t.rows, t.cols, &t.data)
        .map_err(|e| Error::format(path, e.to_string()))
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let t = read_table(path)?;
    if t.rows != 1 && t.cols != 1 {
        return Err(Error::format(
            path,
            format!("expected a single row or column, found {}x{}", t.rows, t.cols),
        ));
    }
    if t.data.iter().any(|v| !v.is_finite()) {
        return Err(Error::format(path, "non-finite entry"));
    }
    Ok(t.data)
}

pub fn write_matrix_csv(path: &Path, matrix: &DesignMatrix) -> Result<()> {
    write_csv(path, matrix.rows(), matrix.cols(), &matrix.to_row_major())
}

/// Writes `values` as a single CSV column.
pub fn write_vector_csv(path: &Path, values: &[f64]) -> Result<()> {
    write_csv(path, values.len(), 1, values)
}

fn write_csv(path: &Path, rows: usize, cols: usize, row_major: &[f64]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut line = String::new();
    for i in 0..rows {
        line.clear();
        for j in 0..cols {
            if j > 0 {
                line.push(',');
            }
            // `{:?}` is the shortest representation that parses back exactly.
            line.push_str(&format!("{:?}", row_major[i * cols + j]));
        }
        line.push('\n');
        w.write_all(line.as_bytes()).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_matrix_binary(path: &Path, matrix: &DesignMatrix) -> Result<()> {
    write_binary(path, matrix.rows(), matrix.cols(), &matrix.to_row_major())
}

pub fn write_vector_binary(path: &Path, values: &[f64]) -> Result<()> {
    write_binary(path, values.len(), 1, values)
}

fn write_binary(path: &Path, rows: usize, cols: usize, row_major: &[f64]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    w.write_all(BINARY_MAGIC).map_err(io)?;
    w.write_all(&(rows as u64).to_le_bytes()).map_err(io)?;
    w.write_all(&(cols as u64).to_le_bytes()).map_err(io)?;
    for v in row_major {
        w.write_all(&v.to_le_bytes()).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Reads the first four bytes of a file; used by callers that want to report the format.
pub fn sniff_binary(path: &Path) -> Result<bool> {
    let mut f = BufReader::new(File::open(path).map_err(|e| Error::io(path, e))?);
    let mut magic = [0u8; 4];
    match f.read_exact(&mut magic) {
        Ok(()) => Ok(&magic == BINARY_MAGIC),
        Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => Ok(false),
        Err(e) => Err(Error::io(path, e)),
    }
}
