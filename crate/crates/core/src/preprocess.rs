//! Missing-value and categorical-variable preprocessing: sparse-column
//! dropping with correlated-proxy reporting, concept-hierarchy level merging,
//! singleton-level removal, and L−1 dummy encoding.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::pearson_r;
use crate::table::{column_stats, Column, ColumnKind, Table};
use crate::Scalar;

/// What [`drop_sparse_columns`] removed and which retained columns can stand
/// in for a removed one.
#[derive(Debug, Clone, Default, Serialize)]
pub struct DropReport {
    /// (column, missing fraction), each above the configured threshold.
    pub dropped: Vec<(String, Scalar)>,
    /// (dropped column, retained column, |r| on pairwise-complete rows).
    ///
    /// A dropped variable that tracks a retained one this strongly deserves a
    /// causal/physical check before the retained one is trusted on its own.
    pub proxies: Vec<(String, String, Scalar)>,
}

/// Removes every column whose missing fraction strictly exceeds `threshold`
/// (default 0.5: filling out half a column is unreliable).
pub fn drop_sparse_columns(table: &Table, threshold: Scalar) -> Result<(Table, DropReport)> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "sparse threshold must be in (0, 1], got {threshold}"
        )));
    }
    let mut dropped = Vec::new();
    for column in table.columns() {
        let stats = column_stats(table, column.name())?;
        if stats.missing_fraction > threshold {
            dropped.push((column.name().to_string(), stats.missing_fraction));
        }
    }
    let names: HashSet<String> = dropped.iter().map(|(n, _)| n.clone()).collect();
    Ok((table.drop_columns(&names), DropReport { dropped, proxies: Vec::new() }))
}

/// Fills in the proxies of a [`DropReport`]: for every dropped numeric column,
/// Pearson |r| against every retained numeric column over rows where both are
/// observed (at least 3 such rows), keeping pairs with |r| ≥ `proxy_threshold`.
pub fn proxy_report(
    table_before_drop: &Table,
    report: &DropReport,
    proxy_threshold: Scalar,
) -> Result<DropReport> {
    let dropped_names: HashSet<&str> =
        report.dropped.iter().map(|(n, _)| n.as_str()).collect();
    let mut out = report.clone();
    out.proxies.clear();
    for (dropped_name, _) in &report.dropped {
        let dropped_col = table_before_drop.column(dropped_name)?;
        if dropped_col.kind() != ColumnKind::Numeric {
            continue;
        }
        for retained in table_before_drop.columns() {
            if retained.kind() != ColumnKind::Numeric
                || dropped_names.contains(retained.name())
            {
                continue;
            }
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for row in 0..table_before_drop.row_count() {
                if let (Some(x), Some(y)) =
                    (dropped_col.numeric_at(row), retained.numeric_at(row))
                {
                    xs.push(x);
                    ys.push(y);
                }
            }
            if xs.len() < 3 {
                continue;
            }
            let r = match pearson_r(&xs, &ys) {
                Ok(r) => r,
                Err(Error::ZeroVariance(_)) => continue,
                Err(e) => return Err(e),
            };
            if r.abs() >= proxy_threshold {
                out.proxies.push((
                    dropped_name.clone(),
                    retained.name().to_string(),
                    r.abs(),
                ));
            }
        }
    }
    Ok(out)
}

/// Level → group mapping for one categorical column (tools → tool groups).
#[derive(Debug, Clone)]
pub struct HierarchyMapping {
    pub column: String,
    pub mapping: BTreeMap<String, String>,
    /// Where unmapped levels go; absent means an unmapped level is an error.
    pub default_group: Option<String>,
}

/// Replaces each level of the mapped column by its group level; the level
/// table is rebuilt densely.
pub fn apply_concept_hierarchy(table: &Table, mapping: &HierarchyMapping) -> Result<Table> {
    let column = table.column(&mapping.column)?;
    if column.kind() != ColumnKind::Categorical {
        return Err(Error::WrongKind {
            column: mapping.column.clone(),
            expected: ColumnKind::Categorical.name(),
            actual: column.kind().name(),
        });
    }
    let mut values: Vec<Option<String>> = Vec::with_capacity(column.len());
    for row in 0..column.len() {
        values.push(match column.level_at(row) {
            None => None,
            Some(level) => match mapping.mapping.get(level) {
                Some(group) => Some(group.clone()),
                None => match &mapping.default_group {
                    Some(group) => Some(group.clone()),
                    None => {
                        return Err(Error::UnmappedLevel {
                            column: mapping.column.clone(),
                            level: level.to_string(),
                        })
                    }
                },
            },
        });
    }
    rebuild_column(table, &mapping.column, Column::categorical(&mapping.column, values))
}

/// Removes the rows whose level occurs exactly once among non-missing cells:
/// a one-shot level cannot be repeated or re-validated, so it cannot train a
/// model. Returns the surviving table and the removed levels.
pub fn drop_singleton_levels(table: &Table, column: &str) -> Result<(Table, Vec<String>)> {
    let col = table.column(column)?;
    if col.kind() != ColumnKind::Categorical {
        return Err(Error::WrongKind {
            column: column.to_string(),
            expected: ColumnKind::Categorical.name(),
            actual: col.kind().name(),
        });
    }
    let counts = col.level_counts().expect("categorical");
    let singleton: HashSet<String> = counts
        .iter()
        .filter(|(_, n)| *n == 1)
        .map(|(level, _)| level.clone())
        .collect();
    let keep: Vec<usize> = (0..table.row_count())
        .filter(|&row| col.level_at(row).map_or(true, |level| !singleton.contains(level)))
        .collect();
    let removed = counts
        .into_iter()
        .filter(|(level, _)| singleton.contains(level))
        .map(|(level, _)| level)
        .collect();
    Ok((table.take_rows(&keep), removed))
}

/// Replaces a categorical column with L ≥ 2 observed levels by L−1 boolean
/// dummy columns named `column=level`, omitting the reference level (most
/// frequent, ties broken lexicographically). A reference-level row is
/// all-false; a missing source cell makes every dummy missing.
pub fn dummy_encode(table: &Table, column: &str, reference_level: Option<&str>) -> Result<Table> {
    let col = table.column(column)?;
    if col.kind() != ColumnKind::Categorical {
        return Err(Error::WrongKind {
            column: column.to_string(),
            expected: ColumnKind::Categorical.name(),
            actual: col.kind().name(),
        });
    }
    let counts = col.level_counts().expect("categorical");
    let observed: Vec<(String, usize)> =
        counts.into_iter().filter(|(_, n)| *n > 0).collect();
    if observed.len() < 2 {
        return Err(Error::TooFewLevels {
            column: column.to_string(),
            needed: 2,
            found: observed.len(),
        });
    }
    let reference = match reference_level {
        Some(level) => {
            if !observed.iter().any(|(l, _)| l == level) {
                return Err(Error::UnknownLevel(level.to_string()));
            }
            level.to_string()
        }
        None => {
            let max_count = observed.iter().map(|(_, n)| *n).max().unwrap();
            observed
                .iter()
                .filter(|(_, n)| *n == max_count)
                .map(|(l, _)| l.clone())
                .min()
                .unwrap()
        }
    };

    let mut out = Table::new(table.name());
    for existing in table.columns() {
        if existing.name() != column {
            out.push_column(existing.clone())?;
            continue;
        }
        // dummies in level-table order, reference omitted
        for (level, _) in observed.iter().filter(|(l, _)| *l != reference) {
            let values: Vec<Option<bool>> = (0..col.len())
                .map(|row| col.level_at(row).map(|cell_level| cell_level == level))
                .collect();
            out.push_column(Column::boolean(format!("{column}={level}"), values))?;
        }
    }
    Ok(out)
}

/// Swaps a rebuilt column in place of the original, keeping column order.
fn rebuild_column(table: &Table, name: &str, replacement: Column) -> Result<Table> {
    let mut out = Table::new(table.name());
    for existing in table.columns() {
        if existing.name() == name {
            out.push_column(replacement.clone())?;
        } else {
            out.push_column(existing.clone())?;
        }
    }
    Ok(out)
}
