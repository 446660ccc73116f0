//! Matrix file I/O.
//!
//! Canonical JSON format: `{"n": N, "rows": [[2N reals] x 2N]}`,
//! row-major. CSV alternative: 2N lines of 2N comma-separated decimals.
//! Writers emit 17 significant digits, enough to round-trip every f64
//! bit-exactly. Files are written atomically (temp file + rename).

use nalgebra::DMatrix;
use serde::Deserialize;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse failure: {0}")]
    Parse(String),
    #[error("malformed matrix: {0}")]
    Shape(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Json,
    Csv,
}

#[derive(Deserialize)]
struct MatrixFile {
    n: usize,
    rows: Vec<Vec<f64>>,
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serialize with 17 significant digits per entry.
pub fn matrix_to_json_string(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    let _ = write!(out, "{{\"n\": {}, \"rows\": [", m.nrows() / 2);
    for r in 0..m.nrows() {
        if r > 0 {
            out.push_str(", ");
        }
        out.push('[');
        for c in 0..m.ncols() {
            if c > 0 {
                out.push_str(", ");
            }
            out.push_str(&fmt17(m[(r, c)]));
        }
        out.push(']');
    }
    out.push_str("]}\n");
    out
}

pub fn matrix_to_csv_string(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| fmt17(m[(r, c)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_matrix_json(text: &str) -> Result<DMatrix<f64>, IoError> {
    let file: MatrixFile =
        serde_json::from_str(text).map_err(|e| IoError::Parse(e.to_string()))?;
    let dim = 2 * file.n;
    if file.rows.len() != dim {
        return Err(IoError::Shape(format!(
            "expected {dim} rows for n = {}, found {}",
            file.n,
            file.rows.len()
        )));
    }
    for (i, row) in file.rows.iter().enumerate() {
        if row.len() != dim {
            return Err(IoError::Shape(format!(
                "row {i} has {} entries, expected {dim}",
                row.len()
            )));
        }
    }
    Ok(DMatrix::from_fn(dim, dim, |r, c| file.rows[r][c]))
}

pub fn parse_matrix_csv(text: &str) -> Result<DMatrix<f64>, IoError> {
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            line.split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<f64>()
                        .map_err(|e| IoError::Parse(format!("bad number {tok:?}: {e}")))
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let dim = rows.len();
    if dim == 0 || !dim.is_multiple_of(2) {
        return Err(IoError::Shape(format!(
            "expected an even number of rows, found {dim}"
        )));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != dim {
            return Err(IoError::Shape(format!(
                "row {i} has {} entries, expected {dim}",
                row.len()
            )));
        }
    }
    Ok(DMatrix::from_fn(dim, dim, |r, c| rows[r][c]))
}

/// Read a matrix, deciding the format from the extension (`.csv` means
/// CSV) with a content fallback (a leading `{` means JSON).
pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>, IoError> {
    let text = std::fs::read_to_string(path)?;
    let by_extension = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.eq_ignore_ascii_case("csv"));
    let is_csv = match by_extension {
        Some(v) => v,
        None => !text.trim_start().starts_with('{'),
    };
    if is_csv {
        parse_matrix_csv(&text)
    } else {
        parse_matrix_json(&text)
    }
}

/// Write bytes atomically: temp file in the target directory, then rename.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(d) => tempfile::NamedTempFile::new_in(d)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| IoError::Io(e.error))?;
    Ok(())
}

pub fn write_matrix(
    path: &Path,
    m: &DMatrix<f64>,
    format: MatrixFormat,
) -> Result<(), IoError> {
    let text = match format {
        MatrixFormat::Json => matrix_to_json_string(m),
        MatrixFormat::Csv => matrix_to_csv_string(m),
    };
    atomic_write(path, text.as_bytes())
}
