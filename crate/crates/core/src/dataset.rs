//! Multivariate series container and CSV input/output.
//!
//! CSV layout: a header row of variable names, then one row per time step.
//! Empty cells and `NaN`/`NA`/`null` markers count as missing. Blank lines
//! are skipped, so single-column files must mark gaps explicitly.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `L x d` real matrix stored column by column, one named column per variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesSet {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl TimeSeriesSet {
    pub fn new(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::DimensionMismatch {
                expected: names.len(),
                found: columns.len(),
            });
        }
        if let Some(first) = columns.first() {
            for c in &columns {
                if c.len() != first.len() {
                    return Err(Error::DimensionMismatch {
                        expected: first.len(),
                        found: c.len(),
                    });
                }
            }
        }
        for (name, col) in names.iter().zip(&columns) {
            if let Some(index) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { index }.in_variable(name));
            }
        }
        Ok(Self { names, columns })
    }

    /// Columns named `x0, x1, ...`.
    pub fn from_columns(columns: Vec<Vec<f64>>) -> Result<Self> {
        let names = (0..columns.len()).map(|i| format!("x{i}")).collect();
        Self::new(names, columns)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn column(&self, i: usize) -> &[f64] {
        &self.columns[i]
    }

    pub fn into_columns(self) -> Vec<Vec<f64>> {
        self.columns
    }

    pub fn n_vars(&self) -> usize {
        self.columns.len()
    }

    pub fn len(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Rows `start..start + len` of every column.
    pub fn slice(&self, start: usize, len: usize) -> Result<Self> {
        if start + len > self.len() {
            return Err(Error::InvalidInput(format!(
                "slice {start}..{} exceeds series length {}",
                start + len,
                self.len()
            )));
        }
        Ok(Self {
            names: self.names.clone(),
            columns: self
                .columns
                .iter()
                .map(|c| c[start..start + len].to_vec())
                .collect(),
        })
    }

    /// Disjoint consecutive blocks of `len` rows; a short trailing remainder is dropped.
    pub fn blocks(&self, len: usize) -> Result<Vec<Self>> {
        if len == 0 {
            return Err(Error::InvalidInput("block length must be positive".into()));
        }
        (0..self.len() / len).map(|b| self.slice(b * len, len)).collect()
    }

    /// Applies a permutation: column `k` of the result is column `order[k]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n_vars()];
        if order.len() != self.n_vars()
            || order.iter().any(|&i| i >= seen.len() || std::mem::replace(&mut seen[i], true))
        {
            return Err(Error::InvalidInput("not a permutation of the variables".into()));
        }
        Ok(Self {
            names: order.iter().map(|&i| self.names[i].clone()).collect(),
            columns: order.iter().map(|&i| self.columns[i].clone()).collect(),
        })
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.names)?;
        let mut row = Vec::with_capacity(self.n_vars());
        for t in 0..self.len() {
            row.clear();
            row.extend(self.columns.iter().map(|c| format_f64(c[t])));
            w.write_record(&row)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.write_csv(file)
    }
}

/// Shortest decimal representation that parses back to the same `f64`.
pub fn format_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedDataset {
    pub data: TimeSeriesSet,
    /// Missing cells per column, before filling.
    pub missing: Vec<usize>,
}

fn is_missing_marker(cell: &str) -> bool {
    matches!(
        cell.to_ascii_lowercase().as_str(),
        "" | "nan" | "na" | "n/a" | "null" | "none"
    )
}

/// Fills missing values in place: linear interpolation between the nearest
/// finite neighbours, nearest-value extension at either end.
///
/// Returns `false` when the column has no finite value at all.
pub fn fill_missing(column: &mut [f64]) -> bool {
    let known: Vec<usize> = (0..column.len()).filter(|&i| column[i].is_finite()).collect();
    let (Some(&first), Some(&last)) = (known.first(), known.last()) else {
        return false;
    };
    let (head, tail) = (column[first], column[last]);
    column[..first].fill(head);
    column[last + 1..].fill(tail);
    for pair in known.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (va, vb) = (column[a], column[b]);
        for i in a + 1..b {
            let t = (i - a) as f64 / (b - a) as f64;
            column[i] = va + t * (vb - va);
        }
    }
    true
}

pub fn read_csv<R: Read>(reader: R, interpolate_missing: bool) -> Result<LoadedDataset> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let names: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if names.is_empty() {
        return Err(Error::InvalidInput("CSV has no columns".into()));
    }
    let mut columns = vec![Vec::new(); names.len()];
    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        // Row numbers are 1-based and count the header.
        let row = r + 2;
        if record.len() != names.len() {
            return Err(Error::Parse {
                row,
                column: String::new(),
                message: format!("expected {} fields, found {}", names.len(), record.len()),
            });
        }
        for (c, cell) in record.iter().enumerate() {
            let value = if is_missing_marker(cell) {
                f64::NAN
            } else {
                match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => v,
                    Ok(_) => f64::NAN,
                    Err(e) => {
                        return Err(Error::Parse {
                            row,
                            column: names[c].clone(),
                            message: format!("`{cell}`: {e}"),
                        })
                    }
                }
            };
            columns[c].push(value);
        }
    }

    let missing: Vec<usize> = columns
        .iter()
        .map(|c| c.iter().filter(|v| v.is_nan()).count())
        .collect();
    for (name, (col, &m)) in names.iter().zip(columns.iter_mut().zip(&missing)) {
        if m == 0 {
            continue;
        }
        if !interpolate_missing {
            return Err(Error::InvalidInput(format!(
                "column `{name}` has {m} missing values and interpolation is disabled"
            )));
        }
        if !fill_missing(col) {
            return Err(Error::UnusableColumn(name.clone()));
        }
    }

    Ok(LoadedDataset {
        data: TimeSeriesSet::new(names, columns)?,
        missing,
    })
}

pub fn load_csv(path: &Path, interpolate_missing: bool) -> Result<LoadedDataset> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, interpolate_missing)
}
