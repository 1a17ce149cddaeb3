//! Typed columnar table: the substrate every pipeline stage operates on.
//!
//! A [`Table`] is an ordered set of equal-length [`Column`]s with per-cell
//! missingness. Tables are immutable after construction; every operation
//! returns a new table.

mod csvio;

pub use csvio::{read_csv, read_csv_from_reader, write_csv, write_csv_to_writer, CsvOptions};

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::{EpochSeconds, Scalar};

/// Column kind, in kind-inference priority order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Numeric,
    Timestamp,
    Boolean,
    Categorical,
}

impl ColumnKind {
    pub fn name(self) -> &'static str {
        match self {
            ColumnKind::Numeric => "numeric",
            ColumnKind::Timestamp => "timestamp",
            ColumnKind::Boolean => "boolean",
            ColumnKind::Categorical => "categorical",
        }
    }
}

/// Cell payloads per kind. Cells flagged missing in the column mask carry a
/// placeholder value that must never be read.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Numeric(Vec<Scalar>),
    /// Level codes are dense indices into `levels`, in first-appearance order.
    Categorical { codes: Vec<u32>, levels: Vec<String> },
    Timestamp(Vec<EpochSeconds>),
    Boolean(Vec<bool>),
}

impl ColumnData {
    fn len(&self) -> usize {
        match self {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Categorical { codes, .. } => codes.len(),
            ColumnData::Timestamp(v) => v.len(),
            ColumnData::Boolean(v) => v.len(),
        }
    }
}

/// A borrowed view of one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell<'a> {
    Missing,
    Number(Scalar),
    Level(&'a str),
    Time(EpochSeconds),
    Bool(bool),
}

impl Cell<'_> {
    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }

    /// Textual rendering used for CSV output and composite keys.
    pub fn render(&self) -> Option<String> {
        match self {
            Cell::Missing => None,
            Cell::Number(v) => Some(format!("{v}")),
            Cell::Level(s) => Some((*s).to_string()),
            Cell::Time(t) => Some(csvio::format_timestamp(*t)),
            Cell::Bool(b) => Some(b.to_string()),
        }
    }
}

/// A named, typed column with a missing mask of the same length.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    name: String,
    data: ColumnData,
    missing: Vec<bool>,
}

impl Column {
    pub fn new(name: impl Into<String>, data: ColumnData, missing: Vec<bool>) -> Self {
        assert_eq!(data.len(), missing.len(), "mask must match data length");
        Column { name: name.into(), data, missing }
    }

    /// Numeric column from optional values.
    pub fn numeric(name: impl Into<String>, values: Vec<Option<Scalar>>) -> Self {
        let missing: Vec<bool> = values.iter().map(Option::is_none).collect();
        let data = values.into_iter().map(Option::unwrap_or_default).collect();
        Column::new(name, ColumnData::Numeric(data), missing)
    }

    /// Timestamp column from optional epoch seconds.
    pub fn timestamp(name: impl Into<String>, values: Vec<Option<EpochSeconds>>) -> Self {
        let missing: Vec<bool> = values.iter().map(Option::is_none).collect();
        let data = values.into_iter().map(Option::unwrap_or_default).collect();
        Column::new(name, ColumnData::Timestamp(data), missing)
    }

    /// Boolean column from optional values.
    pub fn boolean(name: impl Into<String>, values: Vec<Option<bool>>) -> Self {
        let missing: Vec<bool> = values.iter().map(Option::is_none).collect();
        let data = values.into_iter().map(Option::unwrap_or_default).collect();
        Column::new(name, ColumnData::Boolean(data), missing)
    }

    /// Categorical column from optional level texts; the level table is built
    /// densely in first-appearance order.
    pub fn categorical<S: AsRef<str>>(name: impl Into<String>, values: Vec<Option<S>>) -> Self {
        let mut levels: Vec<String> = Vec::new();
        let mut index: HashMap<String, u32> = HashMap::new();
        let mut codes = Vec::with_capacity(values.len());
        let mut missing = Vec::with_capacity(values.len());
        for v in &values {
            match v {
                None => {
                    codes.push(0);
                    missing.push(true);
                }
                Some(s) => {
                    let s = s.as_ref();
                    let code = *index.entry(s.to_string()).or_insert_with(|| {
                        levels.push(s.to_string());
                        (levels.len() - 1) as u32
                    });
                    codes.push(code);
                    missing.push(false);
                }
            }
        }
        Column::new(name, ColumnData::Categorical { codes, levels }, missing)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.missing.len()
    }

    pub fn is_empty(&self) -> bool {
        self.missing.is_empty()
    }

    pub fn kind(&self) -> ColumnKind {
        match &self.data {
            ColumnData::Numeric(_) => ColumnKind::Numeric,
            ColumnData::Categorical { .. } => ColumnKind::Categorical,
            ColumnData::Timestamp(_) => ColumnKind::Timestamp,
            ColumnData::Boolean(_) => ColumnKind::Boolean,
        }
    }

    pub fn data(&self) -> &ColumnData {
        &self.data
    }

    pub fn is_missing(&self, row: usize) -> bool {
        self.missing[row]
    }

    pub fn missing_mask(&self) -> &[bool] {
        &self.missing
    }

    pub fn cell(&self, row: usize) -> Cell<'_> {
        if self.missing[row] {
            return Cell::Missing;
        }
        match &self.data {
            ColumnData::Numeric(v) => Cell::Number(v[row]),
            ColumnData::Categorical { codes, levels } => Cell::Level(&levels[codes[row] as usize]),
            ColumnData::Timestamp(v) => Cell::Time(v[row]),
            ColumnData::Boolean(v) => Cell::Bool(v[row]),
        }
    }

    /// Non-missing numeric value at `row`; timestamps and booleans coerce.
    pub fn numeric_at(&self, row: usize) -> Option<Scalar> {
        if self.missing[row] {
            return None;
        }
        match &self.data {
            ColumnData::Numeric(v) => Some(v[row]),
            ColumnData::Timestamp(v) => Some(v[row] as Scalar),
            ColumnData::Boolean(v) => Some(if v[row] { 1.0 } else { 0.0 }),
            ColumnData::Categorical { .. } => None,
        }
    }

    pub fn timestamp_at(&self, row: usize) -> Option<EpochSeconds> {
        if self.missing[row] {
            return None;
        }
        match &self.data {
            ColumnData::Timestamp(v) => Some(v[row]),
            _ => None,
        }
    }

    /// Level text at `row` for categorical columns.
    pub fn level_at(&self, row: usize) -> Option<&str> {
        if self.missing[row] {
            return None;
        }
        match &self.data {
            ColumnData::Categorical { codes, levels } => Some(&levels[codes[row] as usize]),
            _ => None,
        }
    }

    /// The level table of a categorical column.
    pub fn levels(&self) -> Option<&[String]> {
        match &self.data {
            ColumnData::Categorical { levels, .. } => Some(levels),
            _ => None,
        }
    }

    /// Occurrence count per level among non-missing cells.
    pub fn level_counts(&self) -> Option<Vec<(String, usize)>> {
        match &self.data {
            ColumnData::Categorical { codes, levels } => {
                let mut counts = vec![0usize; levels.len()];
                for (row, &code) in codes.iter().enumerate() {
                    if !self.missing[row] {
                        counts[code as usize] += 1;
                    }
                }
                Some(levels.iter().cloned().zip(counts).collect())
            }
            _ => None,
        }
    }

    fn take_rows(&self, rows: &[usize]) -> Column {
        let missing = rows.iter().map(|&r| self.missing[r]).collect();
        let data = match &self.data {
            ColumnData::Numeric(v) => ColumnData::Numeric(rows.iter().map(|&r| v[r]).collect()),
            ColumnData::Timestamp(v) => ColumnData::Timestamp(rows.iter().map(|&r| v[r]).collect()),
            ColumnData::Boolean(v) => ColumnData::Boolean(rows.iter().map(|&r| v[r]).collect()),
            ColumnData::Categorical { codes, levels } => {
                // Re-densify the level table over the surviving rows.
                let mut new_levels: Vec<String> = Vec::new();
                let mut remap: HashMap<u32, u32> = HashMap::new();
                let mut new_codes = Vec::with_capacity(rows.len());
                for &r in rows {
                    if self.missing[r] {
                        new_codes.push(0);
                    } else {
                        let code = *remap.entry(codes[r]).or_insert_with(|| {
                            new_levels.push(levels[codes[r] as usize].clone());
                            (new_levels.len() - 1) as u32
                        });
                        new_codes.push(code);
                    }
                }
                ColumnData::Categorical { codes: new_codes, levels: new_levels }
            }
        };
        Column { name: self.name.clone(), data, missing }
    }
}

/// Per-column summary statistics over non-missing cells.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnStats {
    pub missing_fraction: f64,
    pub distinct_count: usize,
    /// True iff all non-missing values are equal (vacuously true when none).
    pub is_constant: bool,
    pub min: Option<Scalar>,
    pub max: Option<Scalar>,
    pub mean: Option<Scalar>,
    /// Population (n-divisor) standard deviation.
    pub std: Option<Scalar>,
}

/// Half-open time interval: `start` inclusive, `end` exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TimeWindow {
    start: EpochSeconds,
    end: EpochSeconds,
}

impl TimeWindow {
    pub fn new(start: EpochSeconds, end: EpochSeconds) -> Result<Self> {
        if start < end {
            Ok(TimeWindow { start, end })
        } else {
            Err(Error::InvalidWindow { start, end })
        }
    }

    pub fn start(&self) -> EpochSeconds {
        self.start
    }

    pub fn end(&self) -> EpochSeconds {
        self.end
    }

    pub fn contains(&self, t: EpochSeconds) -> bool {
        self.start <= t && t < self.end
    }
}

/// Ordered collection of equal-length columns with unique names.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    name: String,
    columns: Vec<Column>,
    row_count: usize,
}

impl Table {
    pub fn new(name: impl Into<String>) -> Self {
        Table { name: name.into(), columns: Vec::new(), row_count: 0 }
    }

    pub fn with_columns(name: impl Into<String>, columns: Vec<Column>) -> Result<Self> {
        let mut table = Table::new(name);
        for c in columns {
            table.push_column(c)?;
        }
        Ok(table)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name()).collect()
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        self.columns
            .iter()
            .find(|c| c.name() == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.columns.iter().any(|c| c.name() == name)
    }

    /// Appends a column; the first column fixes the row count.
    pub fn push_column(&mut self, column: Column) -> Result<()> {
        if self.has_column(column.name()) {
            return Err(Error::DuplicateColumn(column.name().to_string()));
        }
        if self.columns.is_empty() {
            self.row_count = column.len();
        } else if column.len() != self.row_count {
            return Err(Error::LengthMismatch {
                column: column.name().to_string(),
                expected: self.row_count,
                got: column.len(),
            });
        }
        self.columns.push(column);
        Ok(())
    }

    /// New table with the given rows, in the given order.
    pub fn take_rows(&self, rows: &[usize]) -> Table {
        Table {
            name: self.name.clone(),
            columns: self.columns.iter().map(|c| c.take_rows(rows)).collect(),
            row_count: rows.len(),
        }
    }

    /// New table without the named columns.
    pub fn drop_columns(&self, names: &HashSet<String>) -> Table {
        Table {
            name: self.name.clone(),
            columns: self
                .columns
                .iter()
                .filter(|c| !names.contains(c.name()))
                .cloned()
                .collect(),
            row_count: self.row_count,
        }
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Table {
        self.name = name.into();
        self
    }
}

/// Summary statistics for one column; see [`ColumnStats`].
pub fn column_stats(table: &Table, column: &str) -> Result<ColumnStats> {
    let col = table.column(column)?;
    let n = col.len();
    let missing = col.missing_mask().iter().filter(|&&m| m).count();
    let missing_fraction = if n == 0 { 0.0 } else { missing as f64 / n as f64 };

    let mut distinct: HashSet<u64> = HashSet::new();
    let mut numeric: Vec<Scalar> = Vec::new();
    for row in 0..n {
        match col.cell(row) {
            Cell::Missing => {}
            Cell::Number(v) => {
                distinct.insert(canonical_bits(v));
                numeric.push(v);
            }
            Cell::Time(t) => {
                distinct.insert(t as u64);
                numeric.push(t as Scalar);
            }
            Cell::Bool(b) => {
                distinct.insert(b as u64);
            }
            Cell::Level(s) => {
                distinct.insert(hash_str(s));
            }
        }
    }

    let (min, max, mean, std) = if numeric.is_empty() {
        (None, None, None, None)
    } else {
        let count = numeric.len() as Scalar;
        let min = numeric.iter().copied().fold(Scalar::INFINITY, Scalar::min);
        let max = numeric.iter().copied().fold(Scalar::NEG_INFINITY, Scalar::max);
        let mean = numeric.iter().sum::<Scalar>() / count;
        let var = numeric.iter().map(|v| (v - mean) * (v - mean)).sum::<Scalar>() / count;
        (Some(min), Some(max), Some(mean), Some(var.sqrt()))
    };

    Ok(ColumnStats {
        missing_fraction,
        distinct_count: distinct.len(),
        is_constant: distinct.len() <= 1,
        min,
        max,
        mean,
        std,
    })
}

fn canonical_bits(v: Scalar) -> u64 {
    // Collapse -0.0 and 0.0 into one distinct value.
    if v == 0.0 {
        0u64
    } else {
        v.to_bits()
    }
}

fn hash_str(s: &str) -> u64 {
    // FNV-1a, enough to count distinct level texts.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x1000_0000_01b3);
    }
    h
}

/// Rows dropped by [`filter_time_window`] because their timestamp was missing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WindowReport {
    pub kept_rows: usize,
    pub dropped_outside: usize,
    pub dropped_missing_time: usize,
}

/// Keeps exactly the rows whose timestamp falls in `window` (start inclusive,
/// end exclusive). Rows with a missing timestamp are dropped and counted.
pub fn filter_time_window(
    table: &Table,
    time_column: &str,
    window: TimeWindow,
) -> Result<(Table, WindowReport)> {
    let col = table.column(time_column)?;
    if col.kind() != ColumnKind::Timestamp {
        return Err(Error::WrongKind {
            column: time_column.to_string(),
            expected: ColumnKind::Timestamp.name(),
            actual: col.kind().name(),
        });
    }
    let mut keep = Vec::new();
    let mut dropped_missing = 0usize;
    let mut dropped_outside = 0usize;
    for row in 0..table.row_count() {
        match col.timestamp_at(row) {
            None => dropped_missing += 1,
            Some(t) if window.contains(t) => keep.push(row),
            Some(_) => dropped_outside += 1,
        }
    }
    let report = WindowReport {
        kept_rows: keep.len(),
        dropped_outside,
        dropped_missing_time: dropped_missing,
    };
    Ok((table.take_rows(&keep), report))
}

/// Appends a categorical key column built by joining the textual rendering of
/// the named cells with `separator`. The new column is named `key_name`, or
/// the source names joined by `separator` when absent; a missing constituent
/// makes the whole key missing.
pub fn make_composite_key(
    table: &Table,
    columns: &[&str],
    separator: &str,
    key_name: Option<&str>,
) -> Result<Table> {
    if columns.is_empty() {
        return Err(Error::InvalidParameter("composite key needs at least one column".into()));
    }
    let parts: Vec<&Column> = columns
        .iter()
        .map(|name| table.column(name))
        .collect::<Result<_>>()?;
    let key_name = key_name.map(str::to_string).unwrap_or_else(|| columns.join(separator));
    if table.has_column(&key_name) {
        return Err(Error::DuplicateColumn(key_name));
    }

    let mut values: Vec<Option<String>> = Vec::with_capacity(table.row_count());
    for row in 0..table.row_count() {
        let rendered: Option<Vec<String>> = parts.iter().map(|c| c.cell(row).render()).collect();
        values.push(rendered.map(|pieces| pieces.join(separator)));
    }
    let mut out = table.clone();
    out.push_column(Column::categorical(key_name, values))?;
    Ok(out)
}

/// Ordered map column name → hinted kind, for CSV ingestion.
pub type SchemaHints = BTreeMap<String, ColumnKind>;
