//! As-of merging of an event-based main table with a monitoring-based table
//! (or vice versa): for every main row, at most one other-table row is picked
//! by key equality plus a timestamp proximity rule.
//!
//! Lookups sort the other table per key and binary-search; the exhaustive
//! scan implementing the rules literally lives in the test suite only.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::table::{Column, ColumnData, ColumnKind, Table};
use crate::EpochSeconds;

/// Timestamp proximity rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MergeMethod {
    /// Minimal |Δt|, ties broken toward the past record.
    Nearest,
    /// Largest other timestamp ≤ the main timestamp (closest record in the past).
    RollForward,
    /// Smallest other timestamp ≥ the main timestamp (immediately after the event).
    RollBackward,
}

impl MergeMethod {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "nearest" => Ok(MergeMethod::Nearest),
            "roll-forward" => Ok(MergeMethod::RollForward),
            "roll-backward" => Ok(MergeMethod::RollBackward),
            other => Err(Error::InvalidParameter(format!(
                "unknown merge method {other:?}; use nearest, roll-forward or roll-backward"
            ))),
        }
    }
}

/// Declaration of one as-of join.
#[derive(Debug, Clone)]
pub struct MergeSpec {
    /// Key columns present in both tables, compared by rendered value.
    pub key_columns: Vec<String>,
    pub main_time: String,
    pub other_time: String,
    pub method: MergeMethod,
    /// Candidates with |Δt| greater than this many seconds are excluded.
    pub tolerance: Option<i64>,
    /// Subset of other-table columns to bring; `None` brings every column
    /// except the keys and the other time column.
    pub columns_to_bring: Option<Vec<String>>,
}

impl MergeSpec {
    pub fn new(
        key_columns: Vec<String>,
        main_time: impl Into<String>,
        other_time: impl Into<String>,
        method: MergeMethod,
    ) -> Self {
        MergeSpec {
            key_columns,
            main_time: main_time.into(),
            other_time: other_time.into(),
            method,
            tolerance: None,
            columns_to_bring: None,
        }
    }

    pub fn with_tolerance(mut self, seconds: i64) -> Self {
        self.tolerance = Some(seconds);
        self
    }

    pub fn bringing<I, S>(mut self, columns: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.columns_to_bring = Some(columns.into_iter().map(Into::into).collect());
        self
    }
}

/// Audit of one merge: match counts and the missing values left in each
/// brought column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MergeReport {
    pub matched_rows: usize,
    pub unmatched_rows: usize,
    /// (brought column, missing cells in the output column).
    pub missing_by_column: Vec<(String, usize)>,
    /// Output rows whose brought columns are all non-missing.
    pub complete_case_rows: usize,
}

/// Joins `other` onto `main` under `spec`. The output keeps exactly main's
/// rows and row order; unmatched rows get missing brought cells.
pub fn asof_merge(main: &Table, other: &Table, spec: &MergeSpec) -> Result<(Table, MergeReport)> {
    let matches = compute_matches(main, other, spec)?;
    attach(main, other, spec, &matches)
}

/// Repeats the merge chain bringing only `selected` variables, the tip for
/// recovering sample size once the important variables are known. Every
/// selected variable must live in exactly one source table.
pub fn remerge_selected(
    main: &Table,
    others: &[(Table, MergeSpec)],
    selected: &[String],
) -> Result<(Table, MergeReport)> {
    let broughtable: Vec<HashSet<String>> = others
        .iter()
        .map(|(table, spec)| {
            let unrestricted = MergeSpec { columns_to_bring: None, ..spec.clone() };
            brought_columns(table, &unrestricted).map(|v| v.into_iter().collect())
        })
        .collect::<Result<_>>()?;
    for variable in selected {
        let count = broughtable.iter().filter(|cols| cols.contains(variable)).count();
        if count != 1 {
            return Err(Error::AmbiguousSelectedVariable { variable: variable.clone(), count });
        }
    }

    let mut current = main.clone();
    let mut matched_all = vec![true; main.row_count()];
    let mut missing_by_column = Vec::new();
    let mut complete = vec![true; main.row_count()];
    for ((table, spec), cols) in others.iter().zip(&broughtable) {
        let bring: Vec<String> = selected.iter().filter(|v| cols.contains(*v)).cloned().collect();
        if bring.is_empty() {
            continue;
        }
        let restricted = MergeSpec { columns_to_bring: Some(bring.clone()), ..spec.clone() };
        let matches = compute_matches(&current, table, &restricted)?;
        for (row, m) in matches.iter().enumerate() {
            if m.is_none() {
                matched_all[row] = false;
            }
        }
        let (merged, report) = attach(&current, table, &restricted, &matches)?;
        for name in &bring {
            for (row, &m) in merged.column(name)?.missing_mask().iter().enumerate() {
                if m {
                    complete[row] = false;
                }
            }
        }
        missing_by_column.extend(report.missing_by_column);
        current = merged;
    }
    let matched_rows = matched_all.iter().filter(|&&m| m).count();
    let report = MergeReport {
        matched_rows,
        unmatched_rows: main.row_count() - matched_rows,
        missing_by_column,
        complete_case_rows: complete.iter().filter(|&&c| c).count(),
    };
    Ok((current, report))
}

/// For each main row, the matched other-table row index, if any.
fn compute_matches(main: &Table, other: &Table, spec: &MergeSpec) -> Result<Vec<Option<usize>>> {
    check_key_kinds(main, other, spec)?;
    let main_time = timestamp_column(main, &spec.main_time)?;
    let other_time = timestamp_column(other, &spec.other_time)?;

    // Per-key sorted candidate lists over usable other rows.
    let other_keys = render_keys(other, &spec.key_columns)?;
    let mut candidates: HashMap<String, Vec<(EpochSeconds, usize)>> = HashMap::new();
    for row in 0..other.row_count() {
        if let (Some(key), Some(t)) = (&other_keys[row], other_time.timestamp_at(row)) {
            candidates.entry(key.clone()).or_default().push((t, row));
        }
    }
    for (key, list) in candidates.iter_mut() {
        list.sort_unstable();
        for pair in list.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::DuplicateKeyTimestamp {
                    key: key.clone(),
                    timestamp: pair[0].0,
                });
            }
        }
    }

    let main_keys = render_keys(main, &spec.key_columns)?;
    let mut matches = Vec::with_capacity(main.row_count());
    for row in 0..main.row_count() {
        let picked = match (&main_keys[row], main_time.timestamp_at(row)) {
            (Some(key), Some(t)) => candidates
                .get(key)
                .and_then(|list| pick(list, t, spec.method, spec.tolerance)),
            _ => None,
        };
        matches.push(picked);
    }
    Ok(matches)
}

fn attach(
    main: &Table,
    other: &Table,
    spec: &MergeSpec,
    matches: &[Option<usize>],
) -> Result<(Table, MergeReport)> {
    let brought = brought_columns(other, spec)?;
    for name in &brought {
        if main.has_column(name) {
            return Err(Error::DuplicateColumn(name.clone()));
        }
    }
    let matched_rows = matches.iter().filter(|m| m.is_some()).count();
    let mut out = main.clone();
    let mut missing_by_column = Vec::with_capacity(brought.len());
    let mut complete = vec![true; main.row_count()];
    for name in &brought {
        let column = gather(other.column(name)?, matches);
        let missing = column.missing_mask().iter().filter(|&&m| m).count();
        for (row, &m) in column.missing_mask().iter().enumerate() {
            if m {
                complete[row] = false;
            }
        }
        missing_by_column.push((name.clone(), missing));
        out.push_column(column)?;
    }
    let report = MergeReport {
        matched_rows,
        unmatched_rows: main.row_count() - matched_rows,
        missing_by_column,
        complete_case_rows: complete.iter().filter(|&&c| c).count(),
    };
    Ok((out, report))
}

fn check_key_kinds(main: &Table, other: &Table, spec: &MergeSpec) -> Result<()> {
    for name in &spec.key_columns {
        let m = main.column(name)?;
        let o = other.column(name)?;
        if m.kind() != o.kind() {
            return Err(Error::KeyKindMismatch {
                column: name.clone(),
                main: m.kind().name(),
                other: o.kind().name(),
            });
        }
    }
    Ok(())
}

fn timestamp_column<'t>(table: &'t Table, name: &str) -> Result<&'t Column> {
    let col = table.column(name)?;
    if col.kind() != ColumnKind::Timestamp {
        return Err(Error::WrongKind {
            column: name.to_string(),
            expected: ColumnKind::Timestamp.name(),
            actual: col.kind().name(),
        });
    }
    Ok(col)
}

fn brought_columns(other: &Table, spec: &MergeSpec) -> Result<Vec<String>> {
    match &spec.columns_to_bring {
        Some(names) => {
            for name in names {
                other.column(name)?;
            }
            // Preserve other-table column order for determinism.
            let wanted: HashSet<&str> = names.iter().map(String::as_str).collect();
            Ok(other
                .column_names()
                .into_iter()
                .filter(|n| wanted.contains(n))
                .map(str::to_string)
                .collect())
        }
        None => Ok(other
            .column_names()
            .into_iter()
            .filter(|n| *n != spec.other_time && !spec.key_columns.iter().any(|k| k == n))
            .map(str::to_string)
            .collect()),
    }
}

/// Per-row composite key rendering; any missing constituent voids the key.
fn render_keys(table: &Table, key_columns: &[String]) -> Result<Vec<Option<String>>> {
    let cols: Vec<&Column> = key_columns
        .iter()
        .map(|name| table.column(name))
        .collect::<Result<_>>()?;
    let mut keys = Vec::with_capacity(table.row_count());
    for row in 0..table.row_count() {
        let parts: Option<Vec<String>> = cols.iter().map(|c| c.cell(row).render()).collect();
        keys.push(parts.map(|p| p.join("\u{1f}")));
    }
    Ok(keys)
}

/// Binary-search pick over a key's sorted `(timestamp, row)` list.
fn pick(
    list: &[(EpochSeconds, usize)],
    t: EpochSeconds,
    method: MergeMethod,
    tolerance: Option<i64>,
) -> Option<usize> {
    let within = |cand_t: EpochSeconds| match tolerance {
        Some(tol) => (cand_t - t).abs() <= tol,
        None => true,
    };
    // Δt = 0 is a valid match in every direction, so the "at or before"
    // and "at or after" sides both include an exact-timestamp candidate.
    let gt = list.partition_point(|&(ct, _)| ct <= t);
    let ge = list.partition_point(|&(ct, _)| ct < t);
    let at_or_before = gt.checked_sub(1).map(|i| list[i]);
    let at_or_after = list.get(ge).copied();
    let chosen = match method {
        MergeMethod::RollForward => at_or_before,
        MergeMethod::RollBackward => at_or_after,
        MergeMethod::Nearest => match (at_or_before, at_or_after) {
            // tie toward the past record
            (Some(p), Some(f)) => Some(if (t - p.0) <= (f.0 - t) { p } else { f }),
            (p, f) => p.or(f),
        },
    };
    chosen.filter(|&(ct, _)| within(ct)).map(|(_, row)| row)
}

/// Builds the brought column: cell from the matched other row, or missing.
fn gather(source: &Column, matches: &[Option<usize>]) -> Column {
    match source.data() {
        ColumnData::Numeric(v) => Column::numeric(
            source.name(),
            matches
                .iter()
                .map(|m| m.and_then(|r| (!source.is_missing(r)).then(|| v[r])))
                .collect(),
        ),
        ColumnData::Timestamp(v) => Column::timestamp(
            source.name(),
            matches
                .iter()
                .map(|m| m.and_then(|r| (!source.is_missing(r)).then(|| v[r])))
                .collect(),
        ),
        ColumnData::Boolean(v) => Column::boolean(
            source.name(),
            matches
                .iter()
                .map(|m| m.and_then(|r| (!source.is_missing(r)).then(|| v[r])))
                .collect(),
        ),
        ColumnData::Categorical { .. } => Column::categorical(
            source.name(),
            matches.iter().map(|m| m.and_then(|r| source.level_at(r))).collect(),
        ),
    }
}
