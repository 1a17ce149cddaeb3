//! CSV ingestion and emission (RFC-4180, UTF-8, header required).
//!
//! Kind inference runs per column over the non-missing cells, in priority
//! order numeric → timestamp → boolean → categorical, so any token that does
//! not parse as a number (a recipe like "12A") forces the whole column
//! categorical. Schema hints override inference.

use std::collections::HashSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime};

use crate::error::{Error, Result};
use crate::{EpochSeconds, Scalar};

use super::{Column, ColumnKind, SchemaHints, Table};

/// Ingestion options: which tokens mean "missing" and per-column kind hints.
#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub missing_tokens: HashSet<String>,
    pub hints: SchemaHints,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            missing_tokens: ["", "NA", "NaN", "NULL"].iter().map(|s| s.to_string()).collect(),
            hints: SchemaHints::new(),
        }
    }
}

impl CsvOptions {
    pub fn with_missing_tokens<I, S>(mut self, tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.missing_tokens = tokens.into_iter().map(Into::into).collect();
        self
    }

    pub fn with_hint(mut self, column: impl Into<String>, kind: ColumnKind) -> Self {
        self.hints.insert(column.into(), kind);
        self
    }
}

/// Reads a CSV file into a [`Table`] named after the file stem.
pub fn read_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<Table> {
    let path = path.as_ref();
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("table").to_string();
    let file = File::open(path)?;
    read_csv_from_reader(file, &name, options)
}

/// Reads CSV from any reader; `name` becomes the table name.
pub fn read_csv_from_reader(reader: impl Read, name: &str, options: &CsvOptions) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.to_string()).collect();
    let mut seen = HashSet::new();
    for h in &headers {
        if !seen.insert(h.clone()) {
            return Err(Error::DuplicateColumn(h.clone()));
        }
    }

    let mut cells: Vec<Vec<Option<String>>> = vec![Vec::new(); headers.len()];
    for record in rdr.records() {
        let record = record?;
        for (i, field) in record.iter().enumerate() {
            let value = if options.missing_tokens.contains(field) {
                None
            } else {
                Some(field.to_string())
            };
            cells[i].push(value);
        }
    }

    let mut table = Table::new(name);
    for (header, column_cells) in headers.into_iter().zip(cells) {
        let kind = match options.hints.get(&header) {
            Some(&k) => k,
            None => infer_kind(&column_cells),
        };
        let column = build_column(&header, kind, column_cells, options.hints.contains_key(&header))?;
        table.push_column(column)?;
    }
    Ok(table)
}

/// Writes a table as CSV. Missing cells render as "NA"; numeric cells use
/// shortest round-trip formatting, timestamps ISO-8601 seconds.
pub fn write_csv(table: &Table, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path)?;
    write_csv_to_writer(table, file)
}

pub fn write_csv_to_writer(table: &Table, writer: impl Write) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(table.column_names())?;
    for row in 0..table.row_count() {
        let record: Vec<String> = table
            .columns()
            .iter()
            .map(|c| c.cell(row).render().unwrap_or_else(|| "NA".to_string()))
            .collect();
        wtr.write_record(&record)?;
    }
    wtr.flush()?;
    Ok(())
}

fn infer_kind(cells: &[Option<String>]) -> ColumnKind {
    let present = cells.iter().flatten();
    if present.clone().all(|s| parse_numeric(s).is_some()) {
        ColumnKind::Numeric
    } else if present.clone().all(|s| parse_timestamp_text(s).is_some()) {
        ColumnKind::Timestamp
    } else if present.clone().all(|s| parse_boolean(s).is_some()) {
        ColumnKind::Boolean
    } else {
        ColumnKind::Categorical
    }
}

fn build_column(
    name: &str,
    kind: ColumnKind,
    cells: Vec<Option<String>>,
    hinted: bool,
) -> Result<Column> {
    let parse_err = |row: usize, token: &str| Error::CellParse {
        column: name.to_string(),
        row,
        token: token.to_string(),
        kind: kind.name(),
    };
    match kind {
        ColumnKind::Numeric => {
            let mut values = Vec::with_capacity(cells.len());
            for (row, cell) in cells.iter().enumerate() {
                values.push(match cell {
                    None => None,
                    Some(s) => Some(parse_numeric(s).ok_or_else(|| parse_err(row, s))?),
                });
            }
            Ok(Column::numeric(name, values))
        }
        ColumnKind::Timestamp => {
            let mut values = Vec::with_capacity(cells.len());
            for (row, cell) in cells.iter().enumerate() {
                values.push(match cell {
                    None => None,
                    // A hinted timestamp column additionally accepts integer
                    // epoch seconds (inference would have made those numeric).
                    Some(s) => {
                        let t = if hinted { parse_timestamp(s) } else { parse_timestamp_text(s) };
                        Some(t.ok_or_else(|| parse_err(row, s))?)
                    }
                });
            }
            Ok(Column::timestamp(name, values))
        }
        ColumnKind::Boolean => {
            let mut values = Vec::with_capacity(cells.len());
            for (row, cell) in cells.iter().enumerate() {
                values.push(match cell {
                    None => None,
                    Some(s) => Some(parse_boolean(s).ok_or_else(|| parse_err(row, s))?),
                });
            }
            Ok(Column::boolean(name, values))
        }
        ColumnKind::Categorical => Ok(Column::categorical(name, cells)),
    }
}

fn parse_numeric(s: &str) -> Option<Scalar> {
    s.trim().parse::<Scalar>().ok()
}

fn parse_boolean(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" => Some(true),
        "false" => Some(false),
        _ => None,
    }
}

/// ISO-8601-ish timestamp text → epoch seconds (sub-second input truncated).
/// Naive datetimes are taken as UTC.
fn parse_timestamp_text(s: &str) -> Option<EpochSeconds> {
    let s = s.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.timestamp());
    }
    const FORMATS: [&str; 4] = [
        "%Y-%m-%dT%H:%M:%S%.f",
        "%Y-%m-%d %H:%M:%S%.f",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M",
    ];
    for fmt in FORMATS {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(dt.and_utc().timestamp());
        }
    }
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Some(d.and_hms_opt(0, 0, 0)?.and_utc().timestamp());
    }
    None
}

/// Timestamp for hinted columns: ISO-8601 text or integer epoch seconds.
fn parse_timestamp(s: &str) -> Option<EpochSeconds> {
    parse_timestamp_text(s).or_else(|| s.trim().parse::<EpochSeconds>().ok())
}

pub(crate) fn format_timestamp(t: EpochSeconds) -> String {
    match DateTime::from_timestamp(t, 0) {
        Some(dt) => dt.format("%Y-%m-%dT%H:%M:%S").to_string(),
        None => t.to_string(),
    }
}
