//! CSV input: a header row naming `x,y` (optionally `t` for a covariate)
//! followed by finite numeric rows.
//!
//! Errors carry file line numbers, counting the header as line 1, so a
//! message can be pasted straight into an editor's goto-line prompt.

use std::fmt;
use std::path::Path;

use qtomo_core::geom::Point2;

/// Parsed input: points in file order, plus the covariate column when the
/// header declares one.
#[derive(Debug, Clone)]
pub struct Table {
    pub points: Vec<Point2>,
    pub covariate: Option<Vec<f64>>,
}

impl Table {
    pub fn rows(&self) -> usize {
        self.points.len()
    }
}

/// What can go wrong between a path and a [`Table`].
#[derive(Debug)]
pub enum DataError {
    /// The file could not be opened or read at all.
    Io { path: String, detail: String },
    /// No data rows (the file may still have a header).
    EmptyFile { path: String },
    /// The header (line 1) lacks a required column.
    MissingColumn { name: &'static str },
    /// A cell failed to parse as a finite number. `row` counts data rows
    /// from 1, so the file line is `row + 1`.
    NonNumericCell { row: usize, col: String, got: String },
}

impl fmt::Display for DataError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataError::Io { path, detail } => write!(f, "{path}: {detail}"),
            DataError::EmptyFile { path } => {
                write!(f, "{path}: no data rows after the header (line 1)")
            }
            DataError::MissingColumn { name } => {
                write!(f, "header (line 1) has no column named '{name}'")
            }
            DataError::NonNumericCell { row, col, got } => write!(
                f,
                "row {row} (line {line}), column '{col}': '{got}' is not a finite number",
                line = row + 1
            ),
        }
    }
}

impl std::error::Error for DataError {}

/// Reads a `x,y[,t]` CSV into a table, preserving row order.
pub fn ingest_csv(path: &Path) -> Result<Table, DataError> {
    let shown = path.display().to_string();
    let io_err = |e: csv::Error| DataError::Io {
        path: shown.clone(),
        detail: e.to_string(),
    };
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(io_err)?;

    let headers = rdr.headers().map_err(io_err)?.clone();
    if headers.iter().all(|h| h.is_empty()) {
        return Err(DataError::EmptyFile { path: shown });
    }
    let find = |name: &'static str| headers.iter().position(|h| h == name);
    let ix = find("x").ok_or(DataError::MissingColumn { name: "x" })?;
    let iy = find("y").ok_or(DataError::MissingColumn { name: "y" })?;
    let it = find("t");

    let cell = |record: &csv::StringRecord, idx: usize, col: &str, row: usize| {
        let raw = record.get(idx).unwrap_or("");
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(DataError::NonNumericCell {
                row,
                col: col.to_string(),
                got: raw.to_string(),
            }),
        }
    };

    let mut points = Vec::new();
    let mut covariate = it.map(|_| Vec::new());
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(io_err)?;
        let x = cell(&record, ix, "x", row)?;
        let y = cell(&record, iy, "y", row)?;
        points.push(Point2::new(x, y));
        if let (Some(ts), Some(idx)) = (covariate.as_mut(), it) {
            ts.push(cell(&record, idx, "t", row)?);
        }
    }
    if points.is_empty() {
        return Err(DataError::EmptyFile { path: shown });
    }
    Ok(Table { points, covariate })
}
