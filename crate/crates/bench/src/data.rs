//! CSV matrices: samples in rows, variables in columns.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use amanpg::spca::{normalize_columns, ColumnScale};
use amanpg::DenseMatrix;

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {source}")]
    Csv {
        line: u64,
        #[source]
        source: csv::Error,
    },
    #[error("line {line}: expected {expected} fields, found {found}")]
    Ragged {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("line {line}, column {column}: `{value}` is not a number")]
    NonNumeric {
        line: u64,
        column: usize,
        value: String,
    },
    #[error("no data rows")]
    Empty,
    #[error("column {column} has zero variance")]
    ZeroVariance { column: usize },
    #[error(transparent)]
    Matrix(#[from] amanpg::Error),
}

/// Parses a rectangular numeric CSV. A first row containing any non-numeric
/// cell is treated as a header and skipped.
pub fn parse_csv<R: Read>(reader: R) -> Result<DenseMatrix, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (idx, rec) in rdr.records().enumerate() {
        let line = idx as u64 + 1;
        let rec = rec.map_err(|source| DataError::Csv { line, source })?;
        if rec.iter().all(|c| c.is_empty()) {
            continue;
        }
        let parsed: Vec<Result<f64, &str>> = rec
            .iter()
            .map(|c| c.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or(c))
            .collect();
        if idx == 0 && parsed.iter().any(|c| c.is_err()) {
            continue;
        }
        let expected = *width.get_or_insert(parsed.len());
        if parsed.len() != expected {
            return Err(DataError::Ragged {
                line,
                expected,
                found: parsed.len(),
            });
        }
        let mut row = Vec::with_capacity(expected);
        for (col, cell) in parsed.into_iter().enumerate() {
            match cell {
                Ok(v) => row.push(v),
                Err(value) => {
                    return Err(DataError::NonNumeric {
                        line,
                        column: col + 1,
                        value: value.to_string(),
                    })
                }
            }
        }
        rows.push(row);
    }
    let m = rows.len();
    let n = width.unwrap_or(0);
    if m == 0 || n == 0 {
        return Err(DataError::Empty);
    }
    Ok(DenseMatrix::from_fn(m, n, |i, j| rows[i][j]))
}

/// Reads a CSV file as is.
pub fn read_csv(path: &Path) -> Result<DenseMatrix, DataError> {
    let file = File::open(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_csv(file)
}

/// Reads a CSV file and normalizes its columns.
pub fn load_csv(path: &Path, center: bool, scale: ColumnScale) -> Result<DenseMatrix, DataError> {
    let raw = read_csv(path)?;
    normalize_columns(&raw, center, scale).map_err(|e| match e {
        amanpg::Error::ZeroVariance { column } => DataError::ZeroVariance { column: column + 1 },
        other => DataError::Matrix(other),
    })
}

/// Writes a matrix with shortest round-trip formatting, no header.
pub fn write_csv(path: &Path, m: &DenseMatrix) -> Result<(), DataError> {
    let io_err = |source| DataError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = BufWriter::new(File::create(path).map_err(io_err)?);
    for i in 0..m.rows() {
        let line: Vec<String> = (0..m.cols()).map(|j| format!("{:?}", m[(i, j)])).collect();
        writeln!(out, "{}", line.join(",")).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}
