//! CSV input/output for datasets and matrices.
//!
//! Datasets: one sample per row, comma-separated finite decimals, with an
//! optional header detected by a non-numeric first line. Matrices: `q` rows
//! of `q` columns. Floats are written in Rust's shortest round-trip form, so
//! rewriting a file is byte-identical.

use crate::error::{Error, Result};
use crate::linalg::{Dataset, SymmetricMatrix};
use std::fmt::Write as _;
use std::path::Path;

fn parse_line(line: &str, line_no: usize) -> Result<Vec<f64>> {
    line.split(',')
        .map(|field| {
            let trimmed = field.trim();
            trimmed.parse::<f64>().map_err(|_| Error::Parse {
                line: line_no,
                what: format!("not a number: {trimmed:?}"),
            })
        })
        .collect()
}

fn is_numeric_line(line: &str) -> bool {
    !line.is_empty() && line.split(',').all(|f| f.trim().parse::<f64>().is_ok())
}

fn parse_rows(content: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    let mut width = None;
    for (idx, raw) in content.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if rows.is_empty() && width.is_none() && !is_numeric_line(line) {
            // Header row; skip it.
            width = Some(line.split(',').count());
            continue;
        }
        let row = parse_line(line, idx + 1)?;
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse {
                line: idx + 1,
                what: "non-finite entry".into(),
            });
        }
        if let Some(w) = width {
            if row.len() != w {
                return Err(Error::Parse {
                    line: idx + 1,
                    what: format!("expected {w} columns, got {}", row.len()),
                });
            }
        } else {
            width = Some(row.len());
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Input("no data rows in CSV".into()));
    }
    Ok(rows)
}

pub fn read_dataset_csv(path: &Path) -> Result<Dataset> {
    let content = std::fs::read_to_string(path)?;
    dataset_from_csv(&content)
}

pub fn dataset_from_csv(content: &str) -> Result<Dataset> {
    let rows = parse_rows(content)?;
    let q = rows[0].len();
    let n = rows.len();
    Dataset::new(n, q, rows.into_iter().flatten().collect())
}

pub fn write_dataset_csv(path: &Path, data: &Dataset) -> Result<()> {
    let mut out = String::new();
    for i in 0..data.n() {
        push_row(&mut out, data.row(i));
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_matrix_csv(path: &Path) -> Result<SymmetricMatrix> {
    let content = std::fs::read_to_string(path)?;
    matrix_from_csv(&content)
}

pub fn matrix_from_csv(content: &str) -> Result<SymmetricMatrix> {
    let rows = parse_rows(content)?;
    let q = rows.len();
    if rows.iter().any(|r| r.len() != q) {
        return Err(Error::Input(format!(
            "matrix CSV must be square, got {q} rows"
        )));
    }
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    let scale = flat.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(1.0);
    SymmetricMatrix::from_rows(q, &flat, 1e-8 * scale)
}

pub fn write_matrix_csv(path: &Path, m: &SymmetricMatrix) -> Result<()> {
    let mut out = String::new();
    for i in 0..m.dim() {
        push_row(&mut out, m.row(i));
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn push_row(out: &mut String, row: &[f64]) {
    for (j, v) in row.iter().enumerate() {
        if j > 0 {
            out.push(',');
        }
        let _ = write!(out, "{v}");
    }
    out.push('\n');
}
