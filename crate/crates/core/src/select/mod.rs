//! The variable-selection ensemble: four selectors (forward stepwise, LASSO,
//! random forest, boosting) run over one table, combined by voting, wrapped
//! in the iterative engineering-validation session.
//!
//! Relying on a single technique is risky when the variable geometry is
//! unknown, so linear and nonlinear selectors run side by side and variables
//! are ranked by how many picked them.

mod boost;
mod forest;
mod kfold;
mod lasso;
mod stepwise;
mod tree;
mod vote;

pub use boost::{boosted_trees_importance, BoostOutcome, BoostParams};
pub use forest::{random_forest_importance, ForestParams, ImportanceOutcome};
pub use kfold::{derive_seed, kfold_indices, seeded_rng};
pub use lasso::{lasso_coordinate_descent, lasso_lambda_max, lasso_select_cv, LassoCvOutcome, LassoFit};
pub use stepwise::{forward_stepwise, StepwiseOutcome};
pub use tree::{DecisionTree, TreeParams, TreeTarget};
pub use vote::{vote, SelectorId, SelectorResult, VoteRow, VoteTable};

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::table::{ColumnKind, Table};
use crate::Scalar;

/// Ensemble-wide knobs; selector-specific structure comes from
/// [`ForestParams`] and [`BoostParams`] built off these values.
#[derive(Debug, Clone, Copy)]
pub struct EnsembleConfig {
    /// Importance-based selectors keep at most this many variables.
    pub top_k: usize,
    pub lasso_folds: usize,
    pub trees: usize,
    pub forest_depth: usize,
    pub forest_min_leaf: usize,
    pub boost_rounds: usize,
    pub boost_rate: f64,
    pub boost_depth: usize,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            top_k: 20,
            lasso_folds: 5,
            trees: 200,
            forest_depth: 8,
            forest_min_leaf: 5,
            boost_rounds: 100,
            boost_rate: 0.1,
            boost_depth: 2,
        }
    }
}

/// Numeric design matrix over the complete cases of `candidates`:
/// numeric/timestamp/boolean coerce to their values, categoricals enter as
/// integer level codes.
struct Design {
    names: Vec<String>,
    columns: Vec<Vec<Scalar>>,
    response: ResponseKind,
}

enum ResponseKind {
    Numeric(Vec<Scalar>),
    /// Two-group response, encoded 0/1: regression target for the linear
    /// selectors, class labels for the forest.
    Binary(Vec<u32>),
}

fn build_design(table: &Table, response: &str, candidates: &[String]) -> Result<Design> {
    let response_col = table.column(response)?;
    for name in candidates {
        table.column(name)?;
    }
    let complete: Vec<usize> = (0..table.row_count())
        .filter(|&row| {
            !response_col.is_missing(row)
                && candidates
                    .iter()
                    .all(|name| !table.column(name).expect("checked above").is_missing(row))
        })
        .collect();

    let numeric_cell = |name: &str, row: usize| -> Scalar {
        let column = table.column(name).expect("checked above");
        match column.kind() {
            ColumnKind::Categorical => {
                let level = column.level_at(row).expect("complete case");
                let levels = column.levels().expect("categorical");
                levels.iter().position(|l| l == level).unwrap() as Scalar
            }
            _ => column.numeric_at(row).expect("complete case"),
        }
    };
    let columns: Vec<Vec<Scalar>> = candidates
        .iter()
        .map(|name| complete.iter().map(|&row| numeric_cell(name, row)).collect())
        .collect();

    let response = match response_col.kind() {
        ColumnKind::Numeric | ColumnKind::Timestamp => ResponseKind::Numeric(
            complete.iter().map(|&row| response_col.numeric_at(row).unwrap()).collect(),
        ),
        ColumnKind::Boolean => ResponseKind::Binary(
            complete.iter().map(|&row| response_col.numeric_at(row).unwrap() as u32).collect(),
        ),
        ColumnKind::Categorical => {
            let counts = response_col.level_counts().unwrap();
            let observed: Vec<&String> =
                counts.iter().filter(|(_, n)| *n > 0).map(|(level, _)| level).collect();
            if observed.len() != 2 {
                return Err(Error::InvalidParameter(format!(
                    "response {response:?} must be numeric or two-level, found {} levels",
                    observed.len()
                )));
            }
            let positive = observed[1].clone();
            ResponseKind::Binary(
                complete
                    .iter()
                    .map(|&row| (response_col.level_at(row).unwrap() == positive) as u32)
                    .collect(),
            )
        }
    };
    Ok(Design { names: candidates.to_vec(), columns, response })
}

/// Runs all four selectors over the candidate columns and returns their
/// results in fixed selector order (stepwise, lasso, forest, boosting).
pub fn run_selector_ensemble(
    table: &Table,
    response: &str,
    candidates: &[String],
    config: &EnsembleConfig,
    seed: u64,
) -> Result<Vec<SelectorResult>> {
    let design = build_design(table, response, candidates)?;
    let names = &design.names;
    let columns = &design.columns;
    let y_numeric: Vec<Scalar> = match &design.response {
        ResponseKind::Numeric(y) => y.clone(),
        ResponseKind::Binary(labels) => labels.iter().map(|&l| l as Scalar).collect(),
    };

    let score_all = |values: &[Scalar]| -> Vec<(String, Scalar)> {
        names.iter().cloned().zip(values.iter().copied()).collect()
    };

    let stepwise_out = forward_stepwise(columns, &y_numeric)?;
    let mut stepwise_scores = vec![0.0; names.len()];
    for &(j, gain) in &stepwise_out.improvements {
        stepwise_scores[j] = gain;
    }
    let stepwise_result = SelectorResult {
        selector: SelectorId::Stepwise,
        selected: stepwise_out.selected.iter().map(|&j| names[j].clone()).collect(),
        scores: score_all(&stepwise_scores),
    };

    let lasso_out =
        lasso_select_cv(columns, &y_numeric, None, config.lasso_folds, derive_seed(seed, 1))?;
    let lasso_scores: Vec<Scalar> = lasso_out.fit.coefficients.iter().map(|c| c.abs()).collect();
    let lasso_result = SelectorResult {
        selector: SelectorId::Lasso,
        selected: lasso_out.selected.iter().map(|&j| names[j].clone()).collect(),
        scores: score_all(&lasso_scores),
    };

    let forest_params = ForestParams {
        trees: config.trees,
        max_depth: config.forest_depth,
        min_leaf: config.forest_min_leaf,
        m_try: None,
        seed: derive_seed(seed, 2),
        top_k: config.top_k,
    };
    let forest_out = match &design.response {
        ResponseKind::Numeric(y) => {
            random_forest_importance(columns, &TreeTarget::Regression(y), &forest_params)?
        }
        ResponseKind::Binary(labels) => random_forest_importance(
            columns,
            &TreeTarget::Classification { labels, classes: 2 },
            &forest_params,
        )?,
    };
    let forest_result = SelectorResult {
        selector: SelectorId::RandomForest,
        selected: forest_out.selected.iter().map(|&j| names[j].clone()).collect(),
        scores: score_all(&forest_out.importance),
    };

    let boost_params = BoostParams {
        rounds: config.boost_rounds,
        rate: config.boost_rate,
        depth: config.boost_depth,
        seed: derive_seed(seed, 3),
        top_k: config.top_k,
    };
    let boost_out = boosted_trees_importance(columns, &y_numeric, &boost_params)?;
    let boost_result = SelectorResult {
        selector: SelectorId::Boosting,
        selected: boost_out.selected.iter().map(|&j| names[j].clone()).collect(),
        scores: score_all(&boost_out.importance),
    };

    Ok(vec![stepwise_result, lasso_result, forest_result, boost_result])
}

/// Settings of the iterative selection workflow.
#[derive(Debug, Clone, Copy)]
pub struct SessionConfig {
    /// Variables reported per round; engineers can only validate so many.
    pub cap: usize,
    /// Rounds of selection + engineering validation; three normally converge.
    pub max_iterations: usize,
    pub seed: u64,
    pub ensemble: EnsembleConfig,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig { cap: 30, max_iterations: 3, seed: 0, ensemble: EnsembleConfig::default() }
    }
}

/// State of the selection ↔ engineering-validation loop. Exclusions are
/// variables rejected by validation; pending ones could not be confirmed yet
/// and are carried into the next round.
#[derive(Debug, Clone)]
pub struct SelectionSession {
    config: SessionConfig,
    completed_iterations: usize,
    excluded: BTreeSet<String>,
    pending: BTreeSet<String>,
    history: Vec<VoteTable>,
}

impl SelectionSession {
    pub fn new(config: SessionConfig) -> Self {
        SelectionSession {
            config,
            completed_iterations: 0,
            excluded: BTreeSet::new(),
            pending: BTreeSet::new(),
            history: Vec::new(),
        }
    }

    pub fn completed_iterations(&self) -> usize {
        self.completed_iterations
    }

    pub fn history(&self) -> &[VoteTable] {
        &self.history
    }

    pub fn excluded(&self) -> impl Iterator<Item = &str> {
        self.excluded.iter().map(String::as_str)
    }

    pub fn pending(&self) -> impl Iterator<Item = &str> {
        self.pending.iter().map(String::as_str)
    }

    /// Records variables rejected by engineering validation.
    pub fn exclude<I, S>(&mut self, variables: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        for variable in variables {
            let variable = variable.into();
            if self.pending.contains(&variable) {
                return Err(Error::ListsOverlap(variable));
            }
            self.excluded.insert(variable);
        }
        Ok(())
    }

    /// Records variables validation could not confirm; they stay candidates.
    pub fn mark_pending<I, S>(&mut self, variables: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        for variable in variables {
            let variable = variable.into();
            if self.excluded.contains(&variable) {
                return Err(Error::ListsOverlap(variable));
            }
            self.pending.insert(variable);
        }
        Ok(())
    }

    /// Clears the pending mark of confirmed variables.
    pub fn confirm<I, S>(&mut self, variables: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        for variable in variables {
            self.pending.remove(&variable.into());
        }
    }

    /// Runs one ensemble round over the non-excluded columns, reports at most
    /// `cap` rows, and always carries pending variables into the report.
    pub fn run_iteration(&mut self, table: &Table, response: &str) -> Result<VoteTable> {
        if self.completed_iterations >= self.config.max_iterations {
            return Err(Error::IterationBudgetExhausted {
                completed: self.completed_iterations,
                max: self.config.max_iterations,
            });
        }
        let candidates: Vec<String> = table
            .column_names()
            .into_iter()
            .filter(|name| *name != response && !self.excluded.contains(*name))
            .map(str::to_string)
            .collect();
        let iteration_seed =
            derive_seed(self.config.seed, 0x5e1ec7 + self.completed_iterations as u64);
        let results = run_selector_ensemble(
            table,
            response,
            &candidates,
            &self.config.ensemble,
            iteration_seed,
        )?;
        let mut report = vote(&results)?.truncated(self.config.cap);
        for row in report.rows.iter_mut() {
            if self.pending.contains(&row.variable) {
                row.pending = true;
            }
        }
        // pending variables stay visible even when no selector re-picked them
        let selector_count = report.selectors.len();
        for variable in &self.pending {
            if !report.rows.iter().any(|r| r.variable == *variable) {
                report.rows.push(VoteRow {
                    variable: variable.clone(),
                    flags: vec![false; selector_count],
                    votes: 0,
                    mean_rank: 1.0,
                    pending: true,
                });
            }
        }
        self.history.push(report.clone());
        self.completed_iterations += 1;
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::Column;

    /// n rows, one planted signal + noise columns; deterministic.
    fn planted_table(n: usize) -> Table {
        let signal: Vec<Option<Scalar>> =
            (0..n).map(|i| Some(((i as Scalar) * 0.83).sin() * 2.0)).collect();
        let noise = |mult: f64| -> Vec<Option<Scalar>> {
            (0..n).map(|i| Some(((i as Scalar) * mult + 0.4).cos())).collect()
        };
        let y: Vec<Option<Scalar>> = signal
            .iter()
            .enumerate()
            .map(|(i, s)| Some(3.0 * s.unwrap() + 0.01 * ((i as Scalar) * 1.7).sin()))
            .collect();
        Table::with_columns(
            "fixture",
            vec![
                Column::numeric("y", y),
                Column::numeric("signal", signal),
                Column::numeric("n1", noise(1.21)),
                Column::numeric("n2", noise(2.47)),
                Column::numeric("n3", noise(0.59)),
            ],
        )
        .unwrap()
    }

    fn small_ensemble() -> EnsembleConfig {
        EnsembleConfig { trees: 40, boost_rounds: 30, ..EnsembleConfig::default() }
    }

    #[test]
    fn ensemble_finds_planted_signal_with_four_votes() {
        let table = planted_table(150);
        let candidates: Vec<String> =
            ["signal", "n1", "n2", "n3"].iter().map(|s| s.to_string()).collect();
        let results =
            run_selector_ensemble(&table, "y", &candidates, &small_ensemble(), 42).unwrap();
        assert_eq!(results.len(), 4);
        for result in &results {
            assert!(
                result.selected.contains(&"signal".to_string()),
                "{:?} missed the signal",
                result.selector
            );
        }
        let table = vote(&results).unwrap();
        assert_eq!(table.rows[0].variable, "signal");
        assert_eq!(table.rows[0].votes, 4);
    }

    #[test]
    fn first_iteration_matches_plain_ensemble_vote() {
        let table = planted_table(120);
        let config =
            SessionConfig { seed: 7, ensemble: small_ensemble(), ..SessionConfig::default() };
        let mut session = SelectionSession::new(config);
        let report = session.run_iteration(&table, "y").unwrap();

        let candidates: Vec<String> =
            ["signal", "n1", "n2", "n3"].iter().map(|s| s.to_string()).collect();
        let plain = vote(
            &run_selector_ensemble(
                &table,
                "y",
                &candidates,
                &config.ensemble,
                derive_seed(7, 0x5e1ec7),
            )
            .unwrap(),
        )
        .unwrap();
        assert_eq!(report, plain.truncated(config.cap));
    }

    #[test]
    fn excluded_variables_never_reappear() {
        let table = planted_table(120);
        let config =
            SessionConfig { seed: 3, ensemble: small_ensemble(), ..SessionConfig::default() };
        let mut session = SelectionSession::new(config);
        let first = session.run_iteration(&table, "y").unwrap();
        let top: Vec<String> = first.rows.iter().take(2).map(|r| r.variable.clone()).collect();
        session.exclude(top.clone()).unwrap();
        let second = session.run_iteration(&table, "y").unwrap();
        for gone in &top {
            assert!(second.rows.iter().all(|r| r.variable != *gone));
        }
        assert_eq!(session.completed_iterations(), 2);
    }

    #[test]
    fn pending_variable_stays_in_report_even_unselected() {
        let table = planted_table(120);
        let config =
            SessionConfig { seed: 5, ensemble: small_ensemble(), ..SessionConfig::default() };
        let mut session = SelectionSession::new(config);
        session.run_iteration(&table, "y").unwrap();
        // a column carrying almost nothing; selectors will not re-pick it
        session.mark_pending(["ghost_sensor"]).unwrap();
        let mut with_ghost = table.clone();
        with_ghost
            .push_column(Column::numeric(
                "ghost_sensor",
                (0..120).map(|i| Some(((i % 2) as Scalar) * 1e-9)).collect(),
            ))
            .unwrap();
        let report = session.run_iteration(&with_ghost, "y").unwrap();
        let ghost = report.rows.iter().find(|r| r.variable == "ghost_sensor").unwrap();
        assert!(ghost.pending);
    }

    #[test]
    fn iteration_budget_is_enforced() {
        let table = planted_table(100);
        let config = SessionConfig {
            max_iterations: 1,
            seed: 1,
            ensemble: EnsembleConfig { trees: 20, boost_rounds: 10, ..EnsembleConfig::default() },
            ..SessionConfig::default()
        };
        let mut session = SelectionSession::new(config);
        session.run_iteration(&table, "y").unwrap();
        assert!(matches!(
            session.run_iteration(&table, "y"),
            Err(Error::IterationBudgetExhausted { .. })
        ));
    }

    #[test]
    fn exclusion_and_pending_stay_disjoint() {
        let mut session = SelectionSession::new(SessionConfig::default());
        session.mark_pending(["a"]).unwrap();
        assert!(matches!(session.exclude(["a"]), Err(Error::ListsOverlap(_))));
        session.confirm(["a"]);
        session.exclude(["a"]).unwrap();
        assert!(matches!(session.mark_pending(["a"]), Err(Error::ListsOverlap(_))));
    }

    #[test]
    fn positive_scaling_leaves_selections_unchanged() {
        // power-of-two scaling is exact in floating point, so the outcome
        // must be identical, not merely close
        let table = planted_table(120);
        let candidates: Vec<String> =
            ["signal", "n1", "n2", "n3"].iter().map(|s| s.to_string()).collect();
        let baseline =
            run_selector_ensemble(&table, "y", &candidates, &small_ensemble(), 11).unwrap();

        let mut scaled_columns = Vec::new();
        for column in table.columns() {
            if column.name() == "signal" {
                let values: Vec<Option<Scalar>> = (0..column.len())
                    .map(|r| column.numeric_at(r).map(|v| v * 1024.0))
                    .collect();
                scaled_columns.push(Column::numeric("signal", values));
            } else {
                scaled_columns.push(column.clone());
            }
        }
        let scaled_table = Table::with_columns("scaled", scaled_columns).unwrap();
        let scaled =
            run_selector_ensemble(&scaled_table, "y", &candidates, &small_ensemble(), 11).unwrap();

        for (a, b) in baseline.iter().zip(&scaled) {
            assert_eq!(a.selected, b.selected, "selector {:?}", a.selector);
        }
        // importance rankings (not raw values) must also match
        let rank = |result: &SelectorResult| -> Vec<String> {
            let mut order = result.scores.clone();
            order.sort_by(|x, y| y.1.partial_cmp(&x.1).unwrap().then(x.0.cmp(&y.0)));
            order.into_iter().map(|(n, _)| n).collect()
        };
        assert_eq!(rank(&baseline[2]), rank(&scaled[2]));
        assert_eq!(rank(&baseline[3]), rank(&scaled[3]));
    }
}
