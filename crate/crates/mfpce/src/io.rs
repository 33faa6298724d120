//! JSON and CSV files. Floats are written with 17 significant digits so
//! they read back bit for bit; every file is written to a temporary file in
//! the target directory and renamed into place.

use std::fs;
use std::io::Write;
use std::path::Path;

use mfpce_core::{ExperimentalDesign, RandomVector};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::{Error, Result};

fn display(path: &Path) -> String {
    path.display().to_string()
}

/// Float formatting used in every CSV: 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write `bytes` to `path` atomically (temp file + rename).
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io_err = |source| Error::Io { path: display(path), source };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(io_err)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|source| Error::Json { path: display(path), source })?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: display(path), source })?;
    serde_json::from_str(&text).map_err(|source| Error::Json { path: display(path), source })
}

pub fn read_rv(path: &Path) -> Result<RandomVector> {
    read_json(path)
}

/// Numeric table from CSV. A first row that does not parse as numbers is
/// taken as a header and skipped.
pub fn read_table(path: &Path) -> Result<Vec<Vec<f64>>> {
    let fmt = |message: String| Error::Format { path: display(path), message };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| fmt(e.to_string()))?;
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| fmt(e.to_string()))?;
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if line == 0 => continue,
            Err(e) => return Err(fmt(format!("line {}: {e}", line + 1))),
        }
    }
    if rows.is_empty() {
        return Err(fmt("no data rows".into()));
    }
    let width = rows[0].len();
    if let Some(i) = rows.iter().position(|r| r.len() != width) {
        return Err(fmt(format!("row {} has {} columns, expected {width}", i + 1, rows[i].len())));
    }
    Ok(rows)
}

/// Design with columns `x1..xM, y`.
pub fn read_design(path: &Path) -> Result<ExperimentalDesign> {
    let rows = read_table(path)?;
    if rows[0].len() < 2 {
        return Err(Error::Format { path: display(path), message: "need input columns and an output column".into() });
    }
    let (inputs, outputs) = rows
        .into_iter()
        .map(|mut r| {
            let y = r.pop().expect("at least two columns");
            (r, y)
        })
        .unzip();
    Ok(ExperimentalDesign::new(inputs, outputs)?)
}

/// CSV text with the given header; every value in 17-digit form.
pub fn table_csv(header: &[String], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(fmt_f64).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn input_header(dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("x{i}")).collect()
}

pub fn write_samples(path: &Path, samples: &[Vec<f64>]) -> Result<()> {
    let dim = samples.first().map_or(0, Vec::len);
    write_atomic(path, table_csv(&input_header(dim), samples.iter().cloned()).as_bytes())
}

pub fn write_design(path: &Path, ed: &ExperimentalDesign) -> Result<()> {
    let mut header = input_header(ed.dim());
    header.push("y".into());
    let rows = ed.inputs.iter().zip(&ed.outputs).map(|(x, y)| {
        let mut r = x.clone();
        r.push(*y);
        r
    });
    write_atomic(path, table_csv(&header, rows).as_bytes())
}
