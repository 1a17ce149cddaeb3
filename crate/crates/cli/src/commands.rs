//! One function per subcommand. Input loading and validation map to exit
//! code 1; failures while computing or writing artifacts map to exit code 2.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde_json::json;

use mfgpipe_core::merge::{asof_merge, MergeMethod, MergeSpec};
use mfgpipe_core::preprocess::{
    apply_concept_hierarchy, drop_singleton_levels, drop_sparse_columns, dummy_encode,
    proxy_report, HierarchyMapping,
};
use mfgpipe_core::report::{render_decision_text, render_metrics_text, render_vote_table_text, vote_table_csv};
use mfgpipe_core::riskeval::{
    classification_metrics, compare_models_by_cost, confusion_matrix, expected_cost_decision,
    expected_value_choice, minimax_regret_decision, roc_auc, DecisionProblem, ScenarioPayoff,
    UnitCosts,
};
use mfgpipe_core::select::{EnsembleConfig, SelectionSession, SessionConfig};
use mfgpipe_core::stats::{quick_filter, vif, FilterRules};
use mfgpipe_core::table::{read_csv, write_csv, ColumnKind, CsvOptions, Table};
use mfgpipe_core::{decompose, Scalar};

use crate::args::*;
use crate::error::{CliError, CliResult};

/// Row/column counts surrounding a stage, for the run manifest.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct StageStats {
    pub rows_before: usize,
    pub cols_before: usize,
    pub rows_after: usize,
    pub cols_after: usize,
}

pub const SCHEMA_VERSION: u32 = 1;

fn csv_options(table: &TableInput) -> CliResult<CsvOptions> {
    let mut options = CsvOptions::default().with_missing_tokens(table.missing_tokens.clone());
    for pair in &table.kinds {
        let (column, kind) = split_pair(pair)?;
        let kind = match kind {
            "numeric" => ColumnKind::Numeric,
            "timestamp" => ColumnKind::Timestamp,
            "boolean" => ColumnKind::Boolean,
            "categorical" => ColumnKind::Categorical,
            other => {
                return Err(CliError::Validation(format!("unknown column kind {other:?}")))
            }
        };
        options = options.with_hint(column, kind);
    }
    Ok(options)
}

fn split_pair(pair: &str) -> CliResult<(&str, &str)> {
    pair.split_once('=')
        .ok_or_else(|| CliError::Validation(format!("expected KEY=VALUE, got {pair:?}")))
}

fn load_table(path: &Path, table: &TableInput) -> CliResult<Table> {
    let options = csv_options(table)?;
    read_csv(path, &options)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn write_table(table: &Table, path: &Path) -> CliResult<()> {
    write_csv(table, path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, value: &serde_json::Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

pub fn run_merge(args: &MergeArgs) -> CliResult<StageStats> {
    let main = load_table(&args.main, &args.table)?;
    let other = load_table(&args.other, &args.table)?;
    let method = MergeMethod::parse(&args.method).map_err(CliError::validation)?;
    let mut spec =
        MergeSpec::new(args.key.clone(), &args.main_time, &args.other_time, method);
    if let Some(tolerance) = args.tolerance {
        if tolerance < 0 {
            return Err(CliError::Validation("tolerance must be ≥ 0".into()));
        }
        spec = spec.with_tolerance(tolerance);
    }
    if let Some(bring) = &args.bring {
        spec = spec.bringing(bring.clone());
    }
    let (merged, report) = asof_merge(&main, &other, &spec).map_err(CliError::validation)?;
    write_table(&merged, &args.out)?;
    if let Some(path) = &args.report {
        write_json(
            path,
            &json!({
                "schema_version": SCHEMA_VERSION,
                "matched_rows": report.matched_rows,
                "unmatched_rows": report.unmatched_rows,
                "missing_by_column": report.missing_by_column,
                "complete_case_rows": report.complete_case_rows,
            }),
        )?;
    }
    Ok(StageStats {
        rows_before: main.row_count(),
        cols_before: main.column_count(),
        rows_after: merged.row_count(),
        cols_after: merged.column_count(),
    })
}

fn load_hierarchy(column: &str, path: &Path, default_group: Option<String>) -> CliResult<HierarchyMapping> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(text.as_bytes());
    let mut mapping = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Validation(e.to_string()))?;
        if record.len() != 2 {
            return Err(CliError::Validation(format!(
                "{}: hierarchy rows are level,group; found {} fields",
                path.display(),
                record.len()
            )));
        }
        mapping.insert(record[0].to_string(), record[1].to_string());
    }
    Ok(HierarchyMapping { column: column.to_string(), mapping, default_group })
}

pub fn run_clean(args: &CleanArgs) -> CliResult<StageStats> {
    let table = load_table(&args.input, &args.table)?;
    let before = (table.row_count(), table.column_count());

    let defaults: BTreeMap<String, String> = args
        .hierarchy_defaults
        .iter()
        .map(|pair| split_pair(pair).map(|(c, g)| (c.to_string(), g.to_string())))
        .collect::<CliResult<_>>()?;
    let mut hierarchies = Vec::new();
    for pair in &args.hierarchies {
        let (column, file) = split_pair(pair)?;
        hierarchies.push(load_hierarchy(column, Path::new(file), defaults.get(column).cloned())?);
    }
    let references: BTreeMap<String, String> = args
        .reference_levels
        .iter()
        .map(|pair| split_pair(pair).map(|(c, l)| (c.to_string(), l.to_string())))
        .collect::<CliResult<_>>()?;

    let (dropped_table, sparse_report) =
        drop_sparse_columns(&table, args.threshold).map_err(CliError::validation)?;
    let sparse_report = proxy_report(&table, &sparse_report, args.proxy_threshold)
        .map_err(CliError::validation)?;

    let mut current = dropped_table;
    for mapping in &hierarchies {
        current = apply_concept_hierarchy(&current, mapping).map_err(CliError::validation)?;
    }
    let mut removed_levels: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for column in &args.drop_singletons {
        let (next, removed) =
            drop_singleton_levels(&current, column).map_err(CliError::validation)?;
        removed_levels.insert(column.clone(), removed);
        current = next;
    }
    for column in &args.dummies {
        current = dummy_encode(&current, column, references.get(column).map(String::as_str))
            .map_err(CliError::validation)?;
    }

    write_table(&current, &args.out)?;
    if let Some(path) = &args.report {
        write_json(
            path,
            &json!({
                "schema_version": SCHEMA_VERSION,
                "threshold": args.threshold,
                "proxy_threshold": args.proxy_threshold,
                "dropped": sparse_report.dropped,
                "proxies": sparse_report.proxies,
                "removed_singleton_levels": removed_levels,
            }),
        )?;
    }
    Ok(StageStats {
        rows_before: before.0,
        cols_before: before.1,
        rows_after: current.row_count(),
        cols_after: current.column_count(),
    })
}

pub fn run_screen(args: &ScreenArgs) -> CliResult<StageStats> {
    let table = load_table(&args.input, &args.table)?;
    let rules = FilterRules { r_min: args.r_min, alpha: args.alpha };
    let outcome = quick_filter(&table, &args.response, &rules).map_err(CliError::validation)?;
    write_json(
        &args.out,
        &json!({
            "schema_version": SCHEMA_VERSION,
            "response": args.response,
            "r_min": args.r_min,
            "alpha": args.alpha,
            "retained": outcome.retained,
            "constant": outcome.constant,
            "results": outcome.results,
        }),
    )?;
    let mut filtered_dims = (table.row_count(), table.column_count());
    if let Some(path) = &args.out_table {
        // response + retained predictors + constants (flagged, never silent)
        let keep: Vec<&str> = std::iter::once(args.response.as_str())
            .chain(outcome.retained.iter().map(String::as_str))
            .chain(outcome.constant.iter().map(String::as_str))
            .collect();
        let drop: std::collections::HashSet<String> = table
            .column_names()
            .into_iter()
            .filter(|n| !keep.contains(n))
            .map(str::to_string)
            .collect();
        let filtered = table.drop_columns(&drop);
        filtered_dims = (filtered.row_count(), filtered.column_count());
        write_table(&filtered, path)?;
    }
    Ok(StageStats {
        rows_before: table.row_count(),
        cols_before: table.column_count(),
        rows_after: filtered_dims.0,
        cols_after: filtered_dims.1,
    })
}

pub fn run_select(args: &SelectArgs) -> CliResult<StageStats> {
    let table = load_table(&args.input, &args.table)?;
    let exclusions: Vec<String> = match &args.exclude {
        None => Vec::new(),
        Some(path) => fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?
            .lines()
            .map(str::trim)
            .filter(|line| !line.is_empty())
            .map(str::to_string)
            .collect(),
    };
    let config = SessionConfig {
        cap: args.cap,
        max_iterations: 1,
        seed: args.seed,
        ensemble: EnsembleConfig {
            top_k: args.top_k,
            trees: args.trees,
            boost_rounds: args.rounds,
            ..EnsembleConfig::default()
        },
    };
    let mut session = SelectionSession::new(config);
    session.exclude(exclusions).map_err(CliError::validation)?;
    let votes = session
        .run_iteration(&table, &args.response)
        .map_err(CliError::runtime)?;
    fs::write(&args.out, vote_table_csv(&votes))
        .map_err(|e| CliError::Runtime(format!("{}: {e}", args.out.display())))?;
    print!("{}", render_vote_table_text(&votes));
    Ok(StageStats {
        rows_before: table.row_count(),
        cols_before: table.column_count(),
        rows_after: votes.rows.len(),
        cols_after: votes.selectors.len() + 2,
    })
}

pub fn run_vif(args: &VifArgs) -> CliResult<StageStats> {
    let table = load_table(&args.input, &args.table)?;
    let names: Vec<&str> = args.predictors.iter().map(String::as_str).collect();
    let report = vif(&table, &names).map_err(CliError::validation)?;
    write_json(
        &args.out,
        &json!({
            "schema_version": SCHEMA_VERSION,
            "per_variable": report.per_variable,
            "average_vif": report.average_vif,
            "infinite_count": report.infinite_count,
            "individual_flags": report.individual_flags,
            "average_flag": report.average_flag,
        }),
    )?;
    Ok(StageStats {
        rows_before: table.row_count(),
        cols_before: table.column_count(),
        rows_after: report.per_variable.len(),
        cols_after: 2,
    })
}

pub fn run_decompose(args: &DecomposeArgs) -> CliResult<StageStats> {
    let table = load_table(&args.input, &args.table)?;
    let column = table.column(&args.column).map_err(CliError::validation)?;
    if column.kind() != ColumnKind::Numeric {
        return Err(CliError::Validation(format!(
            "column {:?} must be numeric, found {}",
            args.column,
            column.kind().name()
        )));
    }
    let values: Vec<Option<Scalar>> =
        (0..column.len()).map(|row| column.numeric_at(row)).collect();
    let series = match &args.time {
        None => decompose::Series::from_values(values),
        Some(time_column) => {
            let time = table.column(time_column).map_err(CliError::validation)?;
            let mut pairs: Vec<(i64, Option<Scalar>)> = Vec::new();
            for row in 0..table.row_count() {
                match time.timestamp_at(row) {
                    Some(t) => pairs.push((t, values[row])),
                    None => {
                        return Err(CliError::Validation(format!(
                            "missing or non-timestamp cell in {time_column:?} at row {row}"
                        )))
                    }
                }
            }
            pairs.sort_by_key(|(t, _)| *t);
            let (timestamps, ordered): (Vec<i64>, Vec<Option<Scalar>>) =
                pairs.into_iter().unzip();
            decompose::Series::new(timestamps, ordered).map_err(CliError::validation)?
        }
    };
    let decomposition =
        decompose::decompose_additive(&series, args.period).map_err(CliError::validation)?;

    let mut out = String::from("value,trend,seasonal,residual\n");
    let fmt = |v: &Option<Scalar>| v.map(|v| format!("{v}")).unwrap_or_else(|| "NA".into());
    for i in 0..series.len() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt(&series.values()[i]),
            fmt(&decomposition.trend.values()[i]),
            fmt(&decomposition.seasonal.values()[i]),
            fmt(&decomposition.residual.values()[i]),
        ));
    }
    fs::write(&args.out, out)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", args.out.display())))?;
    Ok(StageStats {
        rows_before: table.row_count(),
        cols_before: table.column_count(),
        rows_after: series.len(),
        cols_after: 4,
    })
}

pub fn run_evaluate(args: &EvaluateArgs) -> CliResult<StageStats> {
    let table = load_table(&args.input, &args.table)?;
    if !args.scores.is_empty() && args.scores.len() != args.predicted.len() {
        return Err(CliError::Validation(
            "--scores must repeat once per --predicted".into(),
        ));
    }
    let labels = |name: &str| -> CliResult<Vec<Option<String>>> {
        let column = table.column(name).map_err(CliError::validation)?;
        Ok((0..column.len()).map(|row| column.cell(row).render()).collect())
    };
    let actual = labels(&args.actual)?;
    let actual_refs: Vec<Option<&str>> = actual.iter().map(|o| o.as_deref()).collect();

    let mut matrices = Vec::new();
    let mut model_rows = Vec::new();
    let mut text_rows = Vec::new();
    for (index, predicted_column) in args.predicted.iter().enumerate() {
        let predicted = labels(predicted_column)?;
        let predicted_refs: Vec<Option<&str>> =
            predicted.iter().map(|o| o.as_deref()).collect();
        let cm = confusion_matrix(&predicted_refs, &actual_refs, &args.positive)
            .map_err(CliError::validation)?;
        let mut metrics = classification_metrics(&cm).map_err(CliError::validation)?;
        if let Some(score_column) = args.scores.get(index) {
            let column = table.column(score_column).map_err(CliError::validation)?;
            let mut scores = Vec::new();
            let mut flags = Vec::new();
            for row in 0..column.len() {
                match (column.numeric_at(row), &actual_refs[row]) {
                    (Some(s), Some(label)) => {
                        scores.push(s);
                        flags.push(*label == args.positive);
                    }
                    _ => {
                        return Err(CliError::Validation(format!(
                            "missing score or label at row {row}"
                        )))
                    }
                }
            }
            metrics.auc = Some(roc_auc(&scores, &flags).map_err(CliError::validation)?);
        }
        model_rows.push(json!({
            "model": predicted_column,
            "tp": cm.tp, "fp": cm.fp, "fn": cm.fn_, "tn": cm.tn,
            "metrics": metrics,
        }));
        text_rows.push((predicted_column.clone(), metrics));
        matrices.push(cm);
    }

    let mut report = json!({
        "schema_version": SCHEMA_VERSION,
        "positive": args.positive,
        "models": model_rows,
    });
    print!("{}", render_metrics_text(&text_rows));
    if let (Some(type_i), Some(type_ii)) = (args.cost_type_i, args.cost_type_ii) {
        let unit_costs =
            UnitCosts { type_i, type_ii, correct: args.cost_correct };
        let (totals, best) =
            compare_models_by_cost(&matrices, unit_costs).map_err(CliError::validation)?;
        println!("decision costs: {totals:?}; cheapest model: {}", args.predicted[best]);
        report["cost_comparison"] = json!({
            "unit_costs": unit_costs,
            "totals": totals,
            "chosen_model": args.predicted[best],
        });
    }
    write_json(&args.out, &report)?;
    Ok(StageStats {
        rows_before: table.row_count(),
        cols_before: table.column_count(),
        rows_after: args.predicted.len(),
        cols_after: 7,
    })
}

/// Decision file: header row of actions; first column state names, optional
/// second column "probability", remaining cells costs or payoffs.
struct DecisionFile {
    states: Vec<String>,
    probabilities: Option<Vec<Scalar>>,
    actions: Vec<String>,
    /// cells[state][action]
    cells: Vec<Vec<Scalar>>,
}

fn load_decision_file(path: &Path) -> CliResult<DecisionFile> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let headers: Vec<String> =
        reader.headers().map_err(|e| CliError::Validation(e.to_string()))?
            .iter().map(str::to_string).collect();
    if headers.len() < 2 {
        return Err(CliError::Validation("decision file needs a state column and at least one action".into()));
    }
    let has_probability = headers.get(1).is_some_and(|h| h.eq_ignore_ascii_case("probability"));
    let first_action = if has_probability { 2 } else { 1 };
    let actions: Vec<String> = headers[first_action..].to_vec();
    if actions.is_empty() {
        return Err(CliError::Validation("decision file has no action columns".into()));
    }

    let mut states = Vec::new();
    let mut probabilities = Vec::new();
    let mut cells = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Validation(e.to_string()))?;
        states.push(record[0].to_string());
        let parse = |field: &str| -> CliResult<Scalar> {
            field.trim().parse().map_err(|_| {
                CliError::Validation(format!("cannot parse {field:?} as a number"))
            })
        };
        if has_probability {
            probabilities.push(parse(&record[1])?);
        }
        let row: Vec<Scalar> = record
            .iter()
            .skip(first_action)
            .map(parse)
            .collect::<CliResult<_>>()?;
        if row.len() != actions.len() {
            return Err(CliError::Validation("ragged decision file row".into()));
        }
        cells.push(row);
    }
    Ok(DecisionFile {
        states,
        probabilities: has_probability.then_some(probabilities),
        actions,
        cells,
    })
}

pub fn run_decide(args: &DecideArgs) -> CliResult<StageStats> {
    let file = load_decision_file(&args.input)?;
    let (values, decision, value_label) = match args.mode.as_str() {
        "expected-cost" => {
            let probabilities = file.probabilities.clone().ok_or_else(|| {
                CliError::Validation("expected-cost needs a probability column".into())
            })?;
            let problem = DecisionProblem {
                states: file.states.clone(),
                probabilities,
                actions: file.actions.clone(),
                cost: file.cells.clone(),
            };
            let (costs, decision) =
                expected_cost_decision(&problem).map_err(CliError::validation)?;
            (costs, decision, "expected_cost")
        }
        "minimax-regret" | "expected-value" => {
            // file rows are scenarios; the payoff matrix is actions × scenarios
            let payoff: Vec<Vec<Scalar>> = (0..file.actions.len())
                .map(|a| file.cells.iter().map(|row| row[a]).collect())
                .collect();
            let payoffs = ScenarioPayoff {
                actions: file.actions.clone(),
                scenarios: file.states.clone(),
                payoff,
                probabilities: file.probabilities.clone(),
            };
            if args.mode == "minimax-regret" {
                let (regret, decision) =
                    minimax_regret_decision(&payoffs).map_err(CliError::validation)?;
                let worst: Vec<Scalar> = regret
                    .iter()
                    .map(|row| row.iter().copied().fold(Scalar::NEG_INFINITY, Scalar::max))
                    .collect();
                (worst, decision, "max_regret")
            } else {
                let (values, decision) =
                    expected_value_choice(&payoffs).map_err(CliError::validation)?;
                (values, decision, "expected_value")
            }
        }
        other => {
            return Err(CliError::Validation(format!(
                "unknown mode {other:?}; use expected-cost, minimax-regret or expected-value"
            )))
        }
    };
    print!("{}", render_decision_text(&file.actions, &values, value_label, decision));
    if let Some(path) = &args.out {
        write_json(
            path,
            &json!({
                "schema_version": SCHEMA_VERSION,
                "mode": args.mode,
                "actions": file.actions,
                "values": values,
                "decision": file.actions[decision],
            }),
        )?;
    }
    Ok(StageStats {
        rows_before: file.states.len(),
        cols_before: file.actions.len(),
        rows_after: file.actions.len(),
        cols_after: 2,
    })
}

/// Default TableInput for pipeline stages (no CLI flags to flatten).
pub fn plain_table_input() -> TableInput {
    TableInput {
        missing_tokens: ["", "NA", "NaN", "NULL"].iter().map(|s| s.to_string()).collect(),
        kinds: Vec::new(),
    }
}
