//! Quick statistical screening of predictors against one response variable,
//! least-squares fitting, and variance-inflation-factor diagnostics.

mod kernel;
mod linalg;
pub mod special;

pub use kernel::{chi_square_independence, mann_whitney_u, pearson_p, pearson_r, ChiSquare, MannWhitney};
pub use linalg::{least_squares_fit, least_squares_fit_unique, LinearFit};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::table::{Column, ColumnKind, Table};
use crate::Scalar;

/// Which test screened a variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AssociationTest {
    Pearson,
    MannWhitneyU,
    ChiSquare,
}

/// Outcome of screening one predictor against the response.
#[derive(Debug, Clone, Serialize)]
pub struct AssociationResult {
    pub variable: String,
    pub test: AssociationTest,
    pub statistic: Scalar,
    pub p_value: Scalar,
    pub kept: bool,
}

/// Keep thresholds for [`quick_filter`].
#[derive(Debug, Clone, Copy)]
pub struct FilterRules {
    /// Pearson-tested predictors survive when |r| ≥ `r_min`.
    pub r_min: Scalar,
    /// Rank/χ²-tested predictors survive when p ≤ `alpha`.
    pub alpha: Scalar,
}

impl Default for FilterRules {
    fn default() -> Self {
        FilterRules { r_min: 0.1, alpha: 0.05 }
    }
}

/// Everything [`quick_filter`] found, in input column order.
#[derive(Debug, Clone, Serialize)]
pub struct ScreenOutcome {
    pub retained: Vec<String>,
    /// Constant predictors, excluded from testing but never silently dropped:
    /// a constant parameter can still be critical to the process.
    pub constant: Vec<String>,
    pub results: Vec<AssociationResult>,
}

enum VarClass {
    Numeric,
    /// Boolean column, or categorical with exactly two observed levels.
    Binary,
    /// Categorical with three or more observed levels.
    Multi,
}

fn classify(column: &Column) -> VarClass {
    match column.kind() {
        ColumnKind::Numeric | ColumnKind::Timestamp => VarClass::Numeric,
        ColumnKind::Boolean => VarClass::Binary,
        ColumnKind::Categorical => {
            let observed = column
                .level_counts()
                .map(|c| c.iter().filter(|(_, n)| *n > 0).count())
                .unwrap_or(0);
            if observed <= 2 {
                VarClass::Binary
            } else {
                VarClass::Multi
            }
        }
    }
}

/// Screens every other column of `table` against `response` with the cheap
/// test matching the kind pairing: Pearson for numeric/numeric, Mann-Whitney
/// for numeric against a two-group variable (one-vs-rest per level when the
/// grouping variable has more levels), chi-square for categorical pairs.
///
/// Constant predictors are reported separately, not tested. A constant
/// response is an error.
pub fn quick_filter(
    table: &Table,
    response: &str,
    rules: &FilterRules,
) -> Result<ScreenOutcome> {
    let response_col = table.column(response)?;
    if crate::table::column_stats(table, response)?.is_constant {
        return Err(Error::ZeroVariance(response.to_string()));
    }

    let mut retained = Vec::new();
    let mut constant = Vec::new();
    let mut results = Vec::new();
    for predictor in table.columns() {
        if predictor.name() == response {
            continue;
        }
        if crate::table::column_stats(table, predictor.name())?.is_constant {
            constant.push(predictor.name().to_string());
            continue;
        }
        match test_pair(response_col, predictor, rules) {
            Ok(result) => {
                if result.kept {
                    retained.push(result.variable.clone());
                }
                results.push(result);
            }
            // No usable variation on the pairwise-complete overlap: route to
            // the constant report rather than dropping silently.
            Err(
                Error::ZeroVariance(_)
                | Error::EmptyGroup(_)
                | Error::TooFewLevels { .. }
                | Error::TooFewObservations { .. },
            ) => constant.push(predictor.name().to_string()),
            Err(e) => return Err(e),
        }
    }
    Ok(ScreenOutcome { retained, constant, results })
}

fn test_pair(response: &Column, predictor: &Column, rules: &FilterRules) -> Result<AssociationResult> {
    let name = predictor.name().to_string();
    match (classify(response), classify(predictor)) {
        (VarClass::Numeric, VarClass::Numeric) => {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for row in 0..response.len() {
                if let (Some(y), Some(x)) = (response.numeric_at(row), predictor.numeric_at(row)) {
                    ys.push(y);
                    xs.push(x);
                }
            }
            let r = pearson_r(&xs, &ys)?;
            Ok(AssociationResult {
                variable: name,
                test: AssociationTest::Pearson,
                statistic: r,
                p_value: pearson_p(r, xs.len()),
                kept: r.abs() >= rules.r_min,
            })
        }
        (VarClass::Numeric, VarClass::Binary) => {
            rank_test(name, predictor, response, rules)
        }
        (VarClass::Binary, VarClass::Numeric) => {
            rank_test(name, response, predictor, rules)
        }
        (VarClass::Numeric, VarClass::Multi) => {
            one_vs_rest(name, predictor, response, rules)
        }
        (VarClass::Multi, VarClass::Numeric) => {
            one_vs_rest(name, response, predictor, rules)
        }
        // both sides label-like
        _ => {
            let counts = contingency(response, predictor)?;
            let chi = chi_square_independence::<Scalar>(&counts)?;
            Ok(AssociationResult {
                variable: name,
                test: AssociationTest::ChiSquare,
                statistic: chi.statistic,
                p_value: chi.p_value,
                kept: chi.p_value <= rules.alpha,
            })
        }
    }
}

/// Group labels of a two-group column, in level order.
fn binary_groups(column: &Column, row: usize) -> Option<usize> {
    match column.kind() {
        ColumnKind::Boolean => column.numeric_at(row).map(|v| v as usize),
        ColumnKind::Categorical => {
            column.level_at(row).map(|level| {
                let levels = column.levels().expect("categorical");
                levels.iter().position(|l| l == level).unwrap_or(0)
            })
        }
        _ => None,
    }
}

fn rank_test(
    variable: String,
    grouping: &Column,
    values: &Column,
    rules: &FilterRules,
) -> Result<AssociationResult> {
    let mut group0 = Vec::new();
    let mut group1 = Vec::new();
    for row in 0..grouping.len() {
        if let (Some(g), Some(v)) = (binary_groups(grouping, row), values.numeric_at(row)) {
            if g == 0 {
                group0.push(v);
            } else {
                group1.push(v);
            }
        }
    }
    let mw = mann_whitney_u(&group0, &group1)?;
    Ok(AssociationResult {
        variable,
        test: AssociationTest::MannWhitneyU,
        statistic: mw.u,
        p_value: mw.p_value,
        kept: mw.p_value <= rules.alpha,
    })
}

/// Mann-Whitney per level against the rest; the variable survives when any
/// level separates (min p over levels).
fn one_vs_rest(
    variable: String,
    categorical: &Column,
    numeric: &Column,
    rules: &FilterRules,
) -> Result<AssociationResult> {
    let levels = categorical.levels().expect("categorical side").to_vec();
    let mut paired: Vec<(String, Scalar)> = Vec::new();
    for row in 0..categorical.len() {
        if let (Some(level), Some(v)) = (categorical.level_at(row), numeric.numeric_at(row)) {
            paired.push((level.to_string(), v));
        }
    }
    let mut best: Option<MannWhitney<Scalar>> = None;
    for level in &levels {
        let inside: Vec<Scalar> =
            paired.iter().filter(|(l, _)| l == level).map(|&(_, v)| v).collect();
        let outside: Vec<Scalar> =
            paired.iter().filter(|(l, _)| l != level).map(|&(_, v)| v).collect();
        if inside.is_empty() || outside.is_empty() {
            continue;
        }
        let mw = mann_whitney_u(&inside, &outside)?;
        if best.as_ref().map_or(true, |b| mw.p_value < b.p_value) {
            best = Some(mw);
        }
    }
    let best = best.ok_or(Error::TooFewLevels {
        column: variable.clone(),
        needed: 2,
        found: 1,
    })?;
    Ok(AssociationResult {
        variable,
        test: AssociationTest::MannWhitneyU,
        statistic: best.u,
        p_value: best.p_value,
        kept: best.p_value <= rules.alpha,
    })
}

/// Contingency counts over pairwise-complete rows, levels in rendered order.
fn contingency(a: &Column, b: &Column) -> Result<Vec<Vec<usize>>> {
    let mut a_levels: Vec<String> = Vec::new();
    let mut b_levels: Vec<String> = Vec::new();
    let mut pairs = Vec::new();
    for row in 0..a.len() {
        let (va, vb) = (label_at(a, row), label_at(b, row));
        if let (Some(va), Some(vb)) = (va, vb) {
            pairs.push((va.clone(), vb.clone()));
            if !a_levels.contains(&va) {
                a_levels.push(va);
            }
            if !b_levels.contains(&vb) {
                b_levels.push(vb);
            }
        }
    }
    let mut counts = vec![vec![0usize; b_levels.len()]; a_levels.len()];
    for (va, vb) in pairs {
        let i = a_levels.iter().position(|l| *l == va).unwrap();
        let j = b_levels.iter().position(|l| *l == vb).unwrap();
        counts[i][j] += 1;
    }
    Ok(counts)
}

fn label_at(column: &Column, row: usize) -> Option<String> {
    match column.kind() {
        ColumnKind::Categorical => column.level_at(row).map(str::to_string),
        ColumnKind::Boolean => column.cell(row).render(),
        _ => None,
    }
}

/// One predictor's variance inflation factor; `None` means exact linear
/// dependence (infinite VIF).
#[derive(Debug, Clone, Serialize)]
pub struct VifEntry {
    pub variable: String,
    pub vif: Option<Scalar>,
}

/// Multicollinearity diagnostic: VIF per predictor plus the rule-of-thumb
/// flags (individual VIF above 10, average above 6). The average excludes
/// infinite entries; their count is reported separately.
#[derive(Debug, Clone, Serialize)]
pub struct VifReport {
    pub per_variable: Vec<VifEntry>,
    pub average_vif: Option<Scalar>,
    pub infinite_count: usize,
    pub individual_flags: Vec<String>,
    pub average_flag: bool,
}

/// VIFs over the complete cases of the named numeric predictors.
/// VIF_j = 1/(1−R²_j), R²_j from regressing predictor j on the others.
pub fn vif(table: &Table, predictors: &[&str]) -> Result<VifReport> {
    if predictors.len() < 2 {
        return Err(Error::TooFewObservations { needed: 2, got: predictors.len() });
    }
    let columns: Vec<&Column> = predictors
        .iter()
        .map(|name| {
            let c = table.column(name)?;
            if c.kind() != ColumnKind::Numeric {
                return Err(Error::WrongKind {
                    column: name.to_string(),
                    expected: ColumnKind::Numeric.name(),
                    actual: c.kind().name(),
                });
            }
            Ok(c)
        })
        .collect::<Result<_>>()?;

    // listwise deletion across the predictor set
    let complete: Vec<usize> = (0..table.row_count())
        .filter(|&row| columns.iter().all(|c| !c.is_missing(row)))
        .collect();
    if complete.len() < predictors.len() + 2 {
        return Err(Error::TooFewObservations {
            needed: predictors.len() + 2,
            got: complete.len(),
        });
    }
    let matrix: Vec<Vec<Scalar>> = columns
        .iter()
        .map(|c| complete.iter().map(|&row| c.numeric_at(row).unwrap()).collect())
        .collect();
    let values = vif_values(&matrix)?;

    let per_variable: Vec<VifEntry> = predictors
        .iter()
        .zip(&values)
        .map(|(name, v)| VifEntry {
            variable: name.to_string(),
            vif: if v.is_finite() { Some(*v) } else { None },
        })
        .collect();
    let finite: Vec<Scalar> = values.iter().copied().filter(|v| v.is_finite()).collect();
    let infinite_count = values.len() - finite.len();
    let average_vif = if finite.is_empty() {
        None
    } else {
        Some(finite.iter().sum::<Scalar>() / finite.len() as Scalar)
    };
    let individual_flags = per_variable
        .iter()
        .filter(|e| e.vif.map_or(true, |v| v > 10.0))
        .map(|e| e.variable.clone())
        .collect();
    Ok(VifReport {
        per_variable,
        average_vif,
        infinite_count,
        individual_flags,
        average_flag: average_vif.map_or(false, |a| a > 6.0),
    })
}

/// Kernel: VIF per column of a dense matrix; infinity encodes exact
/// dependence. Errors on constant columns.
pub fn vif_values<F: Real>(columns: &[Vec<F>]) -> Result<Vec<F>> {
    let mut out = Vec::with_capacity(columns.len());
    for j in 0..columns.len() {
        let target = &columns[j];
        let mean = target.iter().copied().sum::<F>()
            / crate::scalar::from_count(target.len());
        let tss = target.iter().map(|&v| (v - mean) * (v - mean)).sum::<F>();
        if tss == F::zero() {
            return Err(Error::ZeroVariance(format!("predictor {j}")));
        }
        let others: Vec<Vec<F>> = columns
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != j)
            .map(|(_, c)| c.clone())
            .collect();
        let fit = least_squares_fit(&others, target)?;
        let near_one = F::one() - crate::scalar::real(1e-12);
        if fit.r_squared >= near_one {
            out.push(F::infinity());
        } else {
            out.push((F::one() / (F::one() - fit.r_squared)).max(F::one()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::Column;
    use approx::assert_relative_eq;

    fn table_from_numeric(cols: &[(&str, Vec<Option<Scalar>>)]) -> Table {
        Table::with_columns(
            "t",
            cols.iter().map(|(n, v)| Column::numeric(*n, v.clone())).collect(),
        )
        .unwrap()
    }

    fn some(values: &[Scalar]) -> Vec<Option<Scalar>> {
        values.iter().map(|&v| Some(v)).collect()
    }

    #[test]
    fn quick_filter_removes_weak_pearson() {
        // x1 strongly tracks y; x2 = 0.01·(y − ȳ) + w with w ⊥ (y − ȳ),
        // giving |r| ≈ 0.02, below the 0.1 default
        let y = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
        let w = [1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0, 1.0];
        let x1: Vec<Scalar> = y.iter().map(|v| 2.0 * v + 0.1).collect();
        let x2: Vec<Scalar> = y.iter().zip(&w).map(|(v, wi)| 0.01 * (v - 4.5) + wi).collect();
        let t = table_from_numeric(&[("y", some(&y)), ("x1", some(&x1)), ("x2", some(&x2))]);
        let out = quick_filter(&t, "y", &FilterRules::default()).unwrap();
        assert!(out.results[1].statistic.abs() < 0.1);
        assert_eq!(out.retained, vec!["x1".to_string()]);
        assert_eq!(out.results.len(), 2);
        assert!(out.results.iter().all(|r| r.test == AssociationTest::Pearson));
    }

    #[test]
    fn quick_filter_keeps_identical_predictor_with_r_one() {
        let y = vec![1.0, 2.0, 3.0, 4.0];
        let t = table_from_numeric(&[("y", some(&y)), ("copy", some(&y))]);
        let out = quick_filter(&t, "y", &FilterRules::default()).unwrap();
        assert_eq!(out.retained, vec!["copy".to_string()]);
        assert_relative_eq!(out.results[0].statistic, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn quick_filter_routes_constant_to_its_own_report() {
        let y = vec![1.0, 2.0, 3.0, 4.0];
        let t = table_from_numeric(&[
            ("y", some(&y)),
            ("k", some(&[5.0, 5.0, 5.0, 5.0])),
            ("x", some(&[1.0, 3.0, 2.0, 4.0])),
        ]);
        let out = quick_filter(&t, "y", &FilterRules::default()).unwrap();
        assert_eq!(out.constant, vec!["k".to_string()]);
        assert!(out.results.iter().all(|r| r.variable != "k"));
    }

    #[test]
    fn quick_filter_constant_response_is_error() {
        let t = table_from_numeric(&[
            ("y", some(&[1.0, 1.0, 1.0])),
            ("x", some(&[1.0, 2.0, 3.0])),
        ]);
        assert!(matches!(
            quick_filter(&t, "y", &FilterRules::default()),
            Err(Error::ZeroVariance(_))
        ));
    }

    #[test]
    fn quick_filter_uses_mwu_for_binary_response() {
        let t = Table::with_columns(
            "t",
            vec![
                Column::categorical(
                    "grade",
                    vec![
                        Some("fail"), Some("fail"), Some("fail"), Some("fail"), Some("fail"),
                        Some("pass"), Some("pass"), Some("pass"), Some("pass"), Some("pass"),
                    ],
                ),
                Column::numeric(
                    "temp",
                    some(&[9.1, 8.7, 9.5, 8.9, 9.3, 1.2, 0.8, 1.5, 0.9, 1.1]),
                ),
            ],
        )
        .unwrap();
        let out = quick_filter(&t, "grade", &FilterRules::default()).unwrap();
        assert_eq!(out.results[0].test, AssociationTest::MannWhitneyU);
        assert!(out.results[0].kept, "complete separation must be kept");
    }

    #[test]
    fn quick_filter_uses_chi_square_for_categorical_pair() {
        let a: Vec<Option<&str>> =
            (0..40).map(|i| Some(if i % 2 == 0 { "A" } else { "B" })).collect();
        let b: Vec<Option<&str>> =
            (0..40).map(|i| Some(if i % 2 == 0 { "X" } else { "Y" })).collect();
        let t = Table::with_columns(
            "t",
            vec![Column::categorical("resp", a), Column::categorical("pred", b)],
        )
        .unwrap();
        let out = quick_filter(&t, "resp", &FilterRules::default()).unwrap();
        assert_eq!(out.results[0].test, AssociationTest::ChiSquare);
        assert!(out.results[0].kept);
    }

    #[test]
    fn quick_filter_multi_level_predictor_one_vs_rest() {
        // level "C" separates clearly from the others
        let levels: Vec<Option<&str>> = (0..30)
            .map(|i| Some(match i % 3 {
                0 => "A",
                1 => "B",
                _ => "C",
            }))
            .collect();
        let y: Vec<Option<Scalar>> = (0..30)
            .map(|i| Some(if i % 3 == 2 { 50.0 + (i as Scalar) * 0.01 } else { i as Scalar * 0.1 }))
            .collect();
        let t = Table::with_columns(
            "t",
            vec![Column::numeric("y", y), Column::categorical("tool", levels)],
        )
        .unwrap();
        let out = quick_filter(&t, "y", &FilterRules::default()).unwrap();
        assert_eq!(out.results[0].test, AssociationTest::MannWhitneyU);
        assert!(out.results[0].kept);
    }

    #[test]
    fn quick_filter_monotone_in_r_min() {
        let y = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let x = vec![1.1, 2.3, 2.7, 4.4, 4.6, 6.5];
        let t = table_from_numeric(&[("y", some(&y)), ("x", some(&x))]);
        let mut previous_kept = true;
        for r_min in [0.0, 0.2, 0.4, 0.6, 0.8, 0.95, 0.999, 1.0] {
            let rules = FilterRules { r_min, alpha: 0.05 };
            let out = quick_filter(&t, "y", &rules).unwrap();
            let kept = out.retained.contains(&"x".to_string());
            assert!(previous_kept || !kept, "raising r_min must never re-retain");
            previous_kept = kept;
        }
    }

    #[test]
    fn vif_orthogonal_predictors_are_one() {
        // centered, exactly orthogonal columns
        let x1 = some(&[1.0, 1.0, -1.0, -1.0]);
        let x2 = some(&[1.0, -1.0, 1.0, -1.0]);
        let t = table_from_numeric(&[("x1", x1), ("x2", x2)]);
        let report = vif(&t, &["x1", "x2"]).unwrap();
        for entry in &report.per_variable {
            assert_relative_eq!(entry.vif.unwrap(), 1.0, epsilon = 1e-8);
        }
        assert!(report.individual_flags.is_empty());
        assert!(!report.average_flag);
    }

    #[test]
    fn vif_exact_dependence_is_infinite() {
        let x1 = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let x2 = vec![2.0, 1.0, 4.0, 3.0, 6.0, 5.0];
        let x3: Vec<Scalar> = x1.iter().zip(&x2).map(|(a, b)| a + b).collect();
        let t = table_from_numeric(&[
            ("x1", some(&x1)),
            ("x2", some(&x2)),
            ("x3", some(&x3)),
        ]);
        let report = vif(&t, &["x1", "x2", "x3"]).unwrap();
        assert_eq!(report.infinite_count, 3); // each is explained by the rest
        assert_eq!(report.individual_flags.len(), 3);
    }

    #[test]
    fn vif_closed_form_for_two_correlated_predictors() {
        // r = 0.9 exactly: x1 = u, x2 = 0.9u + √(1−0.81)·v with u ⊥ v
        let u = [1.0, 1.0, -1.0, -1.0, 2.0, -2.0, 0.5, -0.5];
        let v = [1.0, -1.0, 1.0, -1.0, 0.5, -0.5, -2.0, 2.0];
        // make u, v unit-variance, zero-mean, orthogonal by construction
        let su = (u.iter().map(|a| a * a).sum::<f64>() / u.len() as f64).sqrt();
        let sv = (v.iter().map(|a| a * a).sum::<f64>() / v.len() as f64).sqrt();
        let dot: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
        assert_eq!(dot, 0.0);
        let x1: Vec<Scalar> = u.iter().map(|a| a / su).collect();
        let x2: Vec<Scalar> = u
            .iter()
            .zip(&v)
            .map(|(a, b)| 0.9 * a / su + (1.0f64 - 0.81).sqrt() * b / sv)
            .collect();
        let t = table_from_numeric(&[("x1", some(&x1)), ("x2", some(&x2))]);
        let report = vif(&t, &["x1", "x2"]).unwrap();
        for entry in &report.per_variable {
            assert_relative_eq!(entry.vif.unwrap(), 1.0 / (1.0 - 0.81), epsilon = 1e-3);
        }
    }

    #[test]
    fn vif_flags_fire_at_protocol_thresholds() {
        // hand-built report logic: VIF just above 10 flags individually;
        // average above 6 flags the set
        let u = [3.0, 1.0, -1.0, -3.0, 2.0, -2.0, 0.5, -0.5];
        let v = [0.5, -0.5, 0.5, -0.5, 0.25, -0.25, -1.0, 1.0];
        let rho: f64 = 0.96; // VIF ≈ 12.76
        let su = (u.iter().map(|a| a * a).sum::<f64>() / u.len() as f64).sqrt();
        let sv = (v.iter().map(|a| a * a).sum::<f64>() / v.len() as f64).sqrt();
        let x1: Vec<Scalar> = u.iter().map(|a| a / su).collect();
        let x2: Vec<Scalar> = u
            .iter()
            .zip(&v)
            .map(|(a, b)| rho * a / su + (1.0 - rho * rho).sqrt() * b / sv)
            .collect();
        let t = table_from_numeric(&[("x1", some(&x1)), ("x2", some(&x2))]);
        let report = vif(&t, &["x1", "x2"]).unwrap();
        let expected = 1.0 / (1.0 - rho * rho);
        assert!(expected > 10.0);
        assert_eq!(report.individual_flags.len(), 2);
        assert!(report.average_flag);
    }

    #[test]
    fn vif_needs_two_predictors_and_enough_rows() {
        let t = table_from_numeric(&[("x1", some(&[1.0, 2.0, 3.0]))]);
        assert!(vif(&t, &["x1"]).is_err());
        let t2 = table_from_numeric(&[
            ("x1", some(&[1.0, 2.0, 3.0])),
            ("x2", some(&[2.0, 1.0, 3.0])),
        ]);
        assert!(matches!(
            vif(&t2, &["x1", "x2"]),
            Err(Error::TooFewObservations { .. })
        ));
    }

    #[test]
    fn vif_matches_normal_equation_oracle() {
        let x1 = vec![0.54, -1.31, 0.22, 1.94, -0.46, 0.73, -0.11, 1.05, 0.4, -0.9];
        let x2 = vec![-0.27, 0.81, 1.66, -0.93, 0.35, -1.48, 0.62, 0.09, 1.2, -0.3];
        let x3 = vec![1.11, 0.43, -0.78, 0.25, -1.02, 0.57, 1.83, -0.66, -0.2, 0.8];
        let columns = vec![x1, x2, x3];
        let fast = vif_values(&columns).unwrap();
        for j in 0..3 {
            let target = &columns[j];
            let others: Vec<Vec<f64>> = columns
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != j)
                .map(|(_, c)| c.clone())
                .collect();
            let fit = least_squares_fit(&others, target).unwrap();
            let oracle = 1.0 / (1.0 - fit.r_squared);
            assert_relative_eq!(fast[j], oracle, epsilon = 1e-8);
        }
    }
}
