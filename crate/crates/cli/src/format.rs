//! Whitespace-separated matrix text files.
//!
//! One point per line, `d` decimal numbers separated by spaces or tabs. Blank
//! lines and lines whose first non-blank character is `#` are ignored. The
//! same format holds data sets and codebooks.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use breathing_kmeans::{Codebook, DataMatrix, Scalar};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}: cannot parse `{token}` as a number")]
    Number { line: usize, token: String },
    #[error("line {line}: expected {expected} columns, found {found}")]
    Columns {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: non-finite value `{token}`")]
    NonFinite { line: usize, token: String },
    #[error("no data rows")]
    Empty,
}

/// Parsed rows as a flat row-major buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct Table<T> {
    pub values: Vec<T>,
    pub rows: usize,
    pub cols: usize,
}

pub fn parse_table<T: Scalar>(text: &str) -> Result<Table<T>, ParseError> {
    let mut values = Vec::new();
    let mut cols = 0;
    let mut rows = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let before = values.len();
        for token in trimmed.split_whitespace() {
            let v: T = token.parse().map_err(|_| ParseError::Number {
                line,
                token: token.to_string(),
            })?;
            if !v.is_finite() {
                return Err(ParseError::NonFinite {
                    line,
                    token: token.to_string(),
                });
            }
            values.push(v);
        }
        let found = values.len() - before;
        if rows == 0 {
            cols = found;
        } else if found != cols {
            return Err(ParseError::Columns {
                line,
                expected: cols,
                found,
            });
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(ParseError::Empty);
    }
    Ok(Table { values, rows, cols })
}

/// Formats rows with the shortest representation that parses back exactly.
pub fn format_rows<'a, T: Scalar>(rows: impl Iterator<Item = &'a [T]>) -> String {
    let mut out = String::new();
    for row in rows {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            write!(out, "{v}").expect("writing to a String");
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
}

fn read_table<T: Scalar>(path: &Path) -> Result<Table<T>, FileError> {
    let text = fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_table(&text).map_err(|source| FileError::Parse {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_data<T: Scalar>(path: &Path) -> Result<DataMatrix<T>, FileError> {
    let t = read_table(path)?;
    Ok(DataMatrix::new(t.values, t.rows, t.cols).expect("parser validated shape and values"))
}

pub fn read_codebook<T: Scalar>(path: &Path) -> Result<Codebook<T>, FileError> {
    let t = read_table(path)?;
    Ok(Codebook::new(t.values, t.rows, t.cols).expect("parser validated shape and values"))
}

pub fn write_file(path: &Path, contents: &str) -> std::io::Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, contents)
}

pub fn write_data<T: Scalar>(path: &Path, data: &DataMatrix<T>) -> std::io::Result<()> {
    write_file(path, &format_rows(data.rows()))
}

pub fn write_codebook<T: Scalar>(path: &Path, codebook: &Codebook<T>) -> std::io::Result<()> {
    write_file(path, &format_rows(codebook.rows()))
}
