//! Human-readable renderings of the core result tables: the voting table
//! (variable, one 0/1 column per selector, votes), the model-metrics table,
//! and decision summaries.

use std::fmt::Write as _;

use crate::riskeval::MetricSet;
use crate::select::VoteTable;
use crate::Scalar;

/// Voting table in its canonical layout. Pending variables are marked so the
/// next validation round sees them.
pub fn render_vote_table_text(table: &VoteTable) -> String {
    let headers: Vec<String> = std::iter::once("variable".to_string())
        .chain(table.selectors.iter().map(|s| s.label().to_string()))
        .chain(["votes".to_string()])
        .collect();
    let mut rows: Vec<Vec<String>> = Vec::with_capacity(table.rows.len());
    for row in &table.rows {
        let mut cells = Vec::with_capacity(headers.len());
        let name = if row.pending {
            format!("{} (pending)", row.variable)
        } else {
            row.variable.clone()
        };
        cells.push(name);
        cells.extend(row.flags.iter().map(|f| if *f { "1".into() } else { "0".into() }));
        cells.push(row.votes.to_string());
        rows.push(cells);
    }
    aligned(&headers, &rows)
}

/// Voting table as CSV: variable, one 0/1 column per selector, votes.
pub fn vote_table_csv(table: &VoteTable) -> String {
    let mut out = String::from("variable");
    for selector in &table.selectors {
        let _ = write!(out, ",{}", selector.label());
    }
    out.push_str(",votes\n");
    for row in &table.rows {
        out.push_str(&row.variable);
        for flag in &row.flags {
            let _ = write!(out, ",{}", if *flag { 1 } else { 0 });
        }
        let _ = writeln!(out, ",{}", row.votes);
    }
    out
}

/// Per-model metric table: accuracy, recall/sensitivity, specificity,
/// precision, F1, AUC as percentages; undefined metrics print as "-".
pub fn render_metrics_text(models: &[(String, MetricSet)]) -> String {
    let headers = vec![
        "model".to_string(),
        "accuracy".to_string(),
        "recall/sensitivity".to_string(),
        "specificity".to_string(),
        "precision".to_string(),
        "f1".to_string(),
        "auc".to_string(),
    ];
    let percent = |v: &Option<Scalar>| match v {
        Some(v) => format!("{:.1}%", v * 100.0),
        None => "-".to_string(),
    };
    let rows: Vec<Vec<String>> = models
        .iter()
        .map(|(name, m)| {
            vec![
                name.clone(),
                percent(&m.accuracy),
                percent(&m.recall_sensitivity),
                percent(&m.specificity),
                percent(&m.precision),
                percent(&m.f1),
                percent(&m.auc),
            ]
        })
        .collect();
    aligned(&headers, &rows)
}

/// Per-action values plus the final "Decision:" line.
pub fn render_decision_text(
    actions: &[String],
    values: &[Scalar],
    value_label: &str,
    decision: usize,
) -> String {
    let headers = vec!["action".to_string(), value_label.to_string()];
    let rows: Vec<Vec<String>> = actions
        .iter()
        .zip(values)
        .map(|(a, v)| vec![a.clone(), format!("{v}")])
        .collect();
    let mut out = aligned(&headers, &rows);
    let _ = writeln!(out, "Decision: {}", actions[decision]);
    out
}

fn aligned(headers: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(String::len).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let emit = |out: &mut String, cells: &[String]| {
        let line: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(cell, width)| format!("{cell:<width$}"))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    };
    emit(&mut out, headers);
    for row in rows {
        emit(&mut out, row);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riskeval::{classification_metrics, ConfusionMatrix};
    use crate::select::{vote, SelectorId, SelectorResult};

    fn sample_table() -> VoteTable {
        let mk = |selector, picks: &[&str]| SelectorResult {
            selector,
            selected: picks.iter().map(|s| s.to_string()).collect(),
            scores: vec![("a".into(), 1.0), ("b".into(), 0.5)],
        };
        vote(&[
            mk(SelectorId::Stepwise, &["a"]),
            mk(SelectorId::Lasso, &["a", "b"]),
        ])
        .unwrap()
    }

    #[test]
    fn vote_text_has_selector_headers_and_flags() {
        let text = render_vote_table_text(&sample_table());
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert!(header.contains("stepwise"));
        assert!(header.contains("lasso"));
        assert!(header.contains("votes"));
        let first = lines.next().unwrap();
        assert!(first.starts_with('a'));
        assert!(first.contains('1'));
    }

    #[test]
    fn vote_csv_mirrors_the_table() {
        let csv = vote_table_csv(&sample_table());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "variable,stepwise,lasso,votes");
        assert_eq!(lines[1], "a,1,1,2");
        assert_eq!(lines[2], "b,0,1,1");
    }

    #[test]
    fn metrics_text_is_percent_formatted() {
        let cm = ConfusionMatrix::from_counts("Fail", 61, 29, 7, 31);
        let metrics = classification_metrics(&cm).unwrap();
        let text = render_metrics_text(&[("Model A".to_string(), metrics)]);
        assert!(text.contains("71.9%"));
        assert!(text.contains("89.7%"));
        assert!(text.contains('-'), "absent AUC renders as a dash");
    }

    #[test]
    fn decision_text_names_the_chosen_action() {
        let text = render_decision_text(
            &["ship".to_string(), "rework".to_string()],
            &[160.0, 20.0],
            "expected_cost",
            1,
        );
        assert!(text.ends_with("Decision: rework\n"));
    }
}
