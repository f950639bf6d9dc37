//! Output files: per-run histories, a summary table and a JSON digest.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use amanpg::RunReport;
use serde::Serialize;

use crate::experiment::{ExperimentResult, ExperimentSpec, SummaryRecord};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

#[derive(Serialize)]
struct Digest<'a> {
    schema_version: u32,
    spec_echo: &'a ExperimentSpec,
    records: &'a [SummaryRecord],
}

#[derive(Serialize)]
struct HistoryRow {
    k: usize,
    #[serde(rename = "F")]
    f: f64,
    eta_norm: f64,
    seconds: f64,
}

/// File name of the history of one run.
pub fn history_file_name(label: &str, lambda: f64, seed: u64) -> String {
    format!("history_{label}_lambda{lambda}_seed{seed}.csv")
}

pub fn write_history(path: &Path, report: &RunReport) -> Result<(), ReportError> {
    let csv_err = |source| ReportError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for r in &report.history {
        w.serialize(HistoryRow {
            k: r.k,
            f: r.f,
            eta_norm: r.eta_norm,
            seconds: r.seconds,
        })
        .map_err(csv_err)?;
    }
    w.flush().map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_summary_csv(path: &Path, records: &[SummaryRecord]) -> Result<(), ReportError> {
    let csv_err = |source| ReportError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for r in records {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_summary_json(
    path: &Path,
    spec: &ExperimentSpec,
    records: &[SummaryRecord],
) -> Result<(), ReportError> {
    let io_err = |source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = BufWriter::new(File::create(path).map_err(io_err)?);
    let digest = Digest {
        schema_version: SCHEMA_VERSION,
        spec_echo: spec,
        records,
    };
    serde_json::to_writer_pretty(&mut out, &digest).map_err(|source| ReportError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    writeln!(out).map_err(io_err)?;
    out.flush().map_err(io_err)
}

/// Writes `summary.csv`, `summary.json` and one history per successful run
/// into `dir`. Returns the paths written.
pub fn write_all(dir: &Path, result: &ExperimentResult) -> Result<Vec<PathBuf>, ReportError> {
    fs::create_dir_all(dir).map_err(|source| ReportError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    for run in &result.runs {
        if let Ok(report) = &run.report {
            let path = dir.join(history_file_name(
                &run.method.to_string(),
                run.lambda,
                run.seed,
            ));
            write_history(&path, report)?;
            written.push(path);
        }
    }
    let csv_path = dir.join("summary.csv");
    write_summary_csv(&csv_path, &result.summary)?;
    written.push(csv_path);
    let json_path = dir.join("summary.json");
    write_summary_json(&json_path, &result.spec, &result.summary)?;
    written.push(json_path);
    Ok(written)
}

/// Plain-text table for the terminal.
pub fn format_table(records: &[SummaryRecord]) -> String {
    let mut s = format!(
        "{:<12} {:>8} {:>10} {:>10} {:>14} {:>11} {:>9} {:>9} {:>6}\n",
        "method", "lambda", "iter", "time", "F", "eta", "sparsity", "variance", "fail"
    );
    for r in records {
        s.push_str(&format!(
            "{:<12} {:>8} {:>10.1} {:>10.3} {:>14.6e} {:>11.3e} {:>9.4} {:>9.4} {:>6}\n",
            r.variant.to_string(),
            r.lambda,
            r.mean_iter,
            r.mean_time,
            r.mean_f,
            r.mean_eta,
            r.mean_sparsity,
            r.mean_variance,
            r.failures
        ));
    }
    s
}
