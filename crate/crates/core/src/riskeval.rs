//! Decision-risk machinery: confusion matrices and their metrics, ROC AUC,
//! expected-cost decisions over a payoff/cost matrix, minimax regret and
//! expected-value choices, and cost-based model comparison.
//!
//! A more accurate model is not automatically the better decision: Type II
//! misses usually cost more than Type I false alarms, so the cheaper model
//! can be the less accurate one.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{from_count, real, Real};
use crate::Scalar;

/// 2×2 classification counts; `positive_label` is the class of interest
/// (e.g. "Fail"), fp is the Type I false alarm, fn the Type II miss.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    pub positive_label: String,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionMatrix {
    pub fn from_counts(
        positive_label: impl Into<String>,
        tp: usize,
        fp: usize,
        fn_: usize,
        tn: usize,
    ) -> Self {
        ConfusionMatrix { positive_label: positive_label.into(), tp, fp, fn_, tn }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

/// Builds the matrix from paired label sequences; every label other than
/// `positive` counts as negative.
pub fn confusion_matrix(
    predicted: &[Option<&str>],
    actual: &[Option<&str>],
    positive: &str,
) -> Result<ConfusionMatrix> {
    if predicted.len() != actual.len() {
        return Err(Error::InvalidParameter(format!(
            "label sequences differ in length: {} vs {}",
            predicted.len(),
            actual.len()
        )));
    }
    if predicted.is_empty() {
        return Err(Error::TooFewObservations { needed: 1, got: 0 });
    }
    let mut universe_has_positive = false;
    let mut cm = ConfusionMatrix::from_counts(positive, 0, 0, 0, 0);
    for (row, (p, a)) in predicted.iter().zip(actual).enumerate() {
        let (p, a) = match (p, a) {
            (Some(p), Some(a)) => (*p, *a),
            _ => return Err(Error::MissingLabel { row }),
        };
        if p == positive || a == positive {
            universe_has_positive = true;
        }
        match (p == positive, a == positive) {
            (true, true) => cm.tp += 1,
            (true, false) => cm.fp += 1,
            (false, true) => cm.fn_ += 1,
            (false, false) => cm.tn += 1,
        }
    }
    if !universe_has_positive {
        return Err(Error::UnknownPositiveLabel(positive.to_string()));
    }
    Ok(cm)
}

/// Performance metrics; a 0/0 ratio is `None` (undefined), never silently 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSet {
    pub accuracy: Option<Scalar>,
    pub recall_sensitivity: Option<Scalar>,
    pub specificity: Option<Scalar>,
    pub precision: Option<Scalar>,
    pub f1: Option<Scalar>,
    /// Single-threshold (sensitivity + specificity)/2; not the score-based
    /// AUC, which needs the underlying scores (see [`roc_auc`]).
    pub balanced_accuracy: Option<Scalar>,
    pub auc: Option<Scalar>,
}

pub fn classification_metrics(cm: &ConfusionMatrix) -> Result<MetricSet> {
    if cm.total() == 0 {
        return Err(Error::TooFewObservations { needed: 1, got: 0 });
    }
    let ratio = |num: usize, den: usize| -> Option<Scalar> {
        (den > 0).then(|| num as Scalar / den as Scalar)
    };
    let accuracy = ratio(cm.tp + cm.tn, cm.total());
    let recall = ratio(cm.tp, cm.tp + cm.fn_);
    let specificity = ratio(cm.tn, cm.tn + cm.fp);
    let precision = ratio(cm.tp, cm.tp + cm.fp);
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        _ => None,
    };
    let balanced_accuracy = match (recall, specificity) {
        (Some(r), Some(s)) => Some((r + s) / 2.0),
        _ => None,
    };
    Ok(MetricSet {
        accuracy,
        recall_sensitivity: recall,
        specificity,
        precision,
        f1,
        balanced_accuracy,
        auc: None,
    })
}

/// Probability that a uniformly random positive outscores a random negative,
/// ties counted ½ (the trapezoidal ROC area), computed from midranks.
pub fn roc_auc<F: Real>(scores: &[F], is_positive: &[bool]) -> Result<F> {
    if scores.len() != is_positive.len() {
        return Err(Error::InvalidParameter("scores and labels differ in length".into()));
    }
    let n_pos = is_positive.iter().filter(|&&p| p).count();
    let n_neg = scores.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).expect("finite scores"));
    // midrank sum over positives
    let mut rank_sum_pos = F::zero();
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let midrank = (from_count::<F>(i + 1) + from_count::<F>(j + 1)) / real(2.0);
        for &idx in &order[i..=j] {
            if is_positive[idx] {
                rank_sum_pos = rank_sum_pos + midrank;
            }
        }
        i = j + 1;
    }
    let np: F = from_count(n_pos);
    let nn: F = from_count(n_neg);
    let u = rank_sum_pos - np * (np + F::one()) / real(2.0);
    Ok(u / (np * nn))
}

/// States of the world with probabilities, actions, and a state×action cost
/// matrix (payoffs enter as negative costs).
#[derive(Debug, Clone, Serialize)]
pub struct DecisionProblem {
    pub states: Vec<String>,
    pub probabilities: Vec<Scalar>,
    pub actions: Vec<String>,
    /// `cost[state][action]`, currency units.
    pub cost: Vec<Vec<Scalar>>,
}

impl DecisionProblem {
    pub fn validate(&self) -> Result<()> {
        if self.actions.is_empty() {
            return Err(Error::NoActions);
        }
        if self.probabilities.len() != self.states.len()
            || self.cost.len() != self.states.len()
            || self.cost.iter().any(|row| row.len() != self.actions.len())
        {
            return Err(Error::InvalidParameter(
                "cost matrix shape does not match states × actions".into(),
            ));
        }
        let sum: Scalar = self.probabilities.iter().sum();
        if self.probabilities.iter().any(|p| *p < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::BadProbabilities(sum));
        }
        Ok(())
    }
}

/// Expected cost per action and the cheapest action (ties by action order).
pub fn expected_cost_decision(problem: &DecisionProblem) -> Result<(Vec<Scalar>, usize)> {
    problem.validate()?;
    let costs: Vec<Scalar> = (0..problem.actions.len())
        .map(|a| {
            problem
                .probabilities
                .iter()
                .zip(&problem.cost)
                .map(|(p, row)| p * row[a])
                .sum()
        })
        .collect();
    let decision = argmin(&costs);
    Ok((costs, decision))
}

/// Actions × scenarios payoff matrix (higher is better), with optional
/// scenario probabilities.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioPayoff {
    pub actions: Vec<String>,
    pub scenarios: Vec<String>,
    /// `payoff[action][scenario]`.
    pub payoff: Vec<Vec<Scalar>>,
    pub probabilities: Option<Vec<Scalar>>,
}

impl ScenarioPayoff {
    pub fn validate(&self) -> Result<()> {
        if self.actions.is_empty() || self.scenarios.is_empty() {
            return Err(Error::NoActions);
        }
        if self.payoff.len() != self.actions.len()
            || self.payoff.iter().any(|row| row.len() != self.scenarios.len())
        {
            return Err(Error::InvalidParameter(
                "payoff matrix shape does not match actions × scenarios".into(),
            ));
        }
        if let Some(p) = &self.probabilities {
            if p.len() != self.scenarios.len() {
                return Err(Error::InvalidParameter(
                    "probability count does not match scenarios".into(),
                ));
            }
            let sum: Scalar = p.iter().sum();
            if p.iter().any(|v| *v < 0.0) || (sum - 1.0).abs() > 1e-9 {
                return Err(Error::BadProbabilities(sum));
            }
        }
        Ok(())
    }
}

/// Regret matrix (per scenario, shortfall to that scenario's best action) and
/// the action minimizing the worst-case regret (ties by action order).
pub fn minimax_regret_decision(payoffs: &ScenarioPayoff) -> Result<(Vec<Vec<Scalar>>, usize)> {
    payoffs.validate()?;
    let n_scenarios = payoffs.scenarios.len();
    let column_best: Vec<Scalar> = (0..n_scenarios)
        .map(|s| {
            payoffs
                .payoff
                .iter()
                .map(|row| row[s])
                .fold(Scalar::NEG_INFINITY, Scalar::max)
        })
        .collect();
    let regret: Vec<Vec<Scalar>> = payoffs
        .payoff
        .iter()
        .map(|row| row.iter().zip(&column_best).map(|(v, best)| best - v).collect())
        .collect();
    let worst: Vec<Scalar> = regret
        .iter()
        .map(|row| row.iter().copied().fold(Scalar::NEG_INFINITY, Scalar::max))
        .collect();
    let decision = argmin(&worst);
    Ok((regret, decision))
}

/// Action maximizing expected payoff (ties by action order); probabilities
/// are required.
pub fn expected_value_choice(payoffs: &ScenarioPayoff) -> Result<(Vec<Scalar>, usize)> {
    payoffs.validate()?;
    let probabilities =
        payoffs.probabilities.as_ref().ok_or(Error::MissingProbabilities)?;
    let values: Vec<Scalar> = payoffs
        .payoff
        .iter()
        .map(|row| row.iter().zip(probabilities).map(|(v, p)| v * p).sum())
        .collect();
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    Ok((values, best))
}

/// Unit costs for turning a confusion matrix into money.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct UnitCosts {
    /// Per false alarm (fp).
    pub type_i: Scalar,
    /// Per miss (fn), typically the larger: a miss ships a bad product.
    pub type_ii: Scalar,
    /// Per correct classification.
    pub correct: Scalar,
}

/// Total decision cost per model and the cheapest model (ties by input
/// order). All matrices must share the positive label.
pub fn compare_models_by_cost(
    matrices: &[ConfusionMatrix],
    unit_costs: UnitCosts,
) -> Result<(Vec<Scalar>, usize)> {
    if matrices.is_empty() {
        return Err(Error::NoActions);
    }
    for cm in &matrices[1..] {
        if cm.positive_label != matrices[0].positive_label {
            return Err(Error::PositiveLabelMismatch(
                matrices[0].positive_label.clone(),
                cm.positive_label.clone(),
            ));
        }
    }
    let costs: Vec<Scalar> = matrices
        .iter()
        .map(|cm| {
            cm.fp as Scalar * unit_costs.type_i
                + cm.fn_ as Scalar * unit_costs.type_ii
                + (cm.tp + cm.tn) as Scalar * unit_costs.correct
        })
        .collect();
    let decision = argmin(&costs);
    Ok((costs, decision))
}

fn argmin(values: &[Scalar]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// The two 128-lot models used throughout: (tp, fp, fn, tn).
    pub(crate) fn model_a() -> ConfusionMatrix {
        ConfusionMatrix::from_counts("Fail", 61, 29, 7, 31)
    }

    pub(crate) fn model_b() -> ConfusionMatrix {
        ConfusionMatrix::from_counts("Fail", 47, 7, 21, 53)
    }

    #[test]
    fn metrics_for_the_two_reference_models() {
        let a = classification_metrics(&model_a()).unwrap();
        assert_relative_eq!(a.accuracy.unwrap(), 0.719, epsilon = 1e-3);
        assert_relative_eq!(a.recall_sensitivity.unwrap(), 0.897, epsilon = 1e-3);
        assert_relative_eq!(a.specificity.unwrap(), 0.517, epsilon = 1e-3);
        assert_relative_eq!(a.precision.unwrap(), 0.678, epsilon = 1e-3);
        assert_relative_eq!(a.f1.unwrap(), 0.772, epsilon = 1e-3);

        let b = classification_metrics(&model_b()).unwrap();
        assert_relative_eq!(b.accuracy.unwrap(), 0.781, epsilon = 1e-3);
        assert_relative_eq!(b.recall_sensitivity.unwrap(), 0.691, epsilon = 1e-3);
        assert_relative_eq!(b.specificity.unwrap(), 0.883, epsilon = 1e-3);
        assert_relative_eq!(b.precision.unwrap(), 0.870, epsilon = 1e-3);
        assert_relative_eq!(b.f1.unwrap(), 0.770, epsilon = 1e-3);
    }

    #[test]
    fn confusion_matrix_from_labels() {
        let predicted = [Some("Fail"), Some("Fail"), Some("Pass"), Some("Pass")];
        let actual = [Some("Fail"), Some("Pass"), Some("Fail"), Some("Pass")];
        let cm = confusion_matrix(&predicted, &actual, "Fail").unwrap();
        assert_eq!((cm.tp, cm.fp, cm.fn_, cm.tn), (1, 1, 1, 1));
    }

    #[test]
    fn all_correct_has_no_errors() {
        let labels = [Some("Fail"), Some("Pass"), Some("Fail")];
        let cm = confusion_matrix(&labels, &labels, "Fail").unwrap();
        assert_eq!(cm.fp, 0);
        assert_eq!(cm.fn_, 0);
        let m = classification_metrics(&cm).unwrap();
        assert_eq!(m.accuracy, Some(1.0));
    }

    #[test]
    fn complemented_predictions_have_no_hits() {
        let predicted = [Some("Pass"), Some("Fail")];
        let actual = [Some("Fail"), Some("Pass")];
        let cm = confusion_matrix(&predicted, &actual, "Fail").unwrap();
        assert_eq!(cm.tp, 0);
        assert_eq!(cm.tn, 0);
    }

    #[test]
    fn missing_label_is_rejected() {
        let predicted = [Some("Fail"), None];
        let actual = [Some("Fail"), Some("Pass")];
        assert!(matches!(
            confusion_matrix(&predicted, &actual, "Fail"),
            Err(Error::MissingLabel { row: 1 })
        ));
    }

    #[test]
    fn unknown_positive_label_is_rejected() {
        let labels = [Some("a"), Some("b")];
        assert!(matches!(
            confusion_matrix(&labels, &labels, "Fail"),
            Err(Error::UnknownPositiveLabel(_))
        ));
    }

    #[test]
    fn undefined_ratios_surface_as_none() {
        // no predicted positives: precision 0/0
        let cm = ConfusionMatrix::from_counts("Fail", 0, 0, 2, 2);
        let m = classification_metrics(&cm).unwrap();
        assert_eq!(m.precision, None);
        assert_eq!(m.recall_sensitivity, Some(0.0));
        assert_eq!(m.f1, None);
    }

    #[test]
    fn label_swap_exchanges_recall_and_specificity() {
        let cm = model_a();
        let swapped = ConfusionMatrix::from_counts("Pass", cm.tn, cm.fn_, cm.fp, cm.tp);
        let m = classification_metrics(&cm).unwrap();
        let s = classification_metrics(&swapped).unwrap();
        assert_eq!(m.recall_sensitivity, s.specificity);
        assert_eq!(m.specificity, s.recall_sensitivity);
    }

    #[test]
    fn auc_of_perfect_separation_is_one() {
        let scores = [0.9, 0.8, 0.2, 0.1];
        let labels = [true, true, false, false];
        assert_relative_eq!(roc_auc(&scores, &labels).unwrap(), 1.0);
    }

    #[test]
    fn auc_of_constant_scores_is_half() {
        let scores = [0.5, 0.5, 0.5, 0.5];
        let labels = [true, false, true, false];
        assert_relative_eq!(roc_auc(&scores, &labels).unwrap(), 0.5);
    }

    #[test]
    fn auc_small_case_matches_pair_count() {
        // positives {0.9, 0.4}, negatives {0.6, 0.1}: 3 of 4 pairs win
        let scores = [0.9, 0.4, 0.6, 0.1];
        let labels = [true, true, false, false];
        assert_relative_eq!(roc_auc(&scores, &labels).unwrap(), 0.75);
    }

    #[test]
    fn auc_single_class_is_error() {
        let scores = [0.5, 0.7];
        assert!(matches!(roc_auc(&scores, &[true, true]), Err(Error::SingleClass)));
    }

    fn ship_or_rework(rework_cost: Scalar) -> DecisionProblem {
        DecisionProblem {
            states: vec!["in-spec".into(), "out-of-spec".into()],
            probabilities: vec![0.2, 0.8],
            actions: vec!["ship".into(), "rework".into()],
            cost: vec![vec![0.0, rework_cost], vec![200.0, rework_cost]],
        }
    }

    #[test]
    fn ship_or_rework_expected_costs() {
        let (costs, decision) = expected_cost_decision(&ship_or_rework(20.0)).unwrap();
        assert_eq!(costs, vec![160.0, 20.0]);
        assert_eq!(decision, 1, "rework wins at $20");

        // the counterexample: rework at $2000 flips the decision to ship
        let (costs, decision) = expected_cost_decision(&ship_or_rework(2000.0)).unwrap();
        assert_eq!(costs, vec![160.0, 2000.0]);
        assert_eq!(decision, 0);
    }

    #[test]
    fn degenerate_probability_reads_one_row() {
        let problem = DecisionProblem {
            states: vec!["s0".into(), "s1".into()],
            probabilities: vec![1.0, 0.0],
            actions: vec!["a".into(), "b".into()],
            cost: vec![vec![3.0, 7.0], vec![100.0, 1.0]],
        };
        let (costs, decision) = expected_cost_decision(&problem).unwrap();
        assert_eq!(costs, vec![3.0, 7.0]);
        assert_eq!(decision, 0);
    }

    #[test]
    fn bad_probabilities_are_rejected() {
        let mut problem = ship_or_rework(20.0);
        problem.probabilities = vec![0.5, 0.6];
        assert!(matches!(
            expected_cost_decision(&problem),
            Err(Error::BadProbabilities(_))
        ));
    }

    #[test]
    fn expected_cost_argmin_invariant_under_shift_and_scale() {
        let base = ship_or_rework(20.0);
        let (_, baseline) = expected_cost_decision(&base).unwrap();
        let mut shifted = base.clone();
        for row in shifted.cost.iter_mut() {
            for c in row.iter_mut() {
                *c = *c * 3.5 + 100.0;
            }
        }
        let (_, decision) = expected_cost_decision(&shifted).unwrap();
        assert_eq!(decision, baseline);
    }

    fn two_by_two() -> ScenarioPayoff {
        ScenarioPayoff {
            actions: vec!["A1".into(), "A2".into()],
            scenarios: vec!["s1".into(), "s2".into()],
            payoff: vec![vec![10.0, 2.0], vec![6.0, 5.0]],
            probabilities: None,
        }
    }

    #[test]
    fn minimax_regret_small_case() {
        let (regret, decision) = minimax_regret_decision(&two_by_two()).unwrap();
        assert_eq!(regret, vec![vec![0.0, 3.0], vec![4.0, 0.0]]);
        assert_eq!(decision, 0, "max regret 3 beats 4");
    }

    #[test]
    fn minimax_regret_single_scenario_is_argmax_payoff() {
        let payoffs = ScenarioPayoff {
            actions: vec!["A1".into(), "A2".into(), "A3".into()],
            scenarios: vec!["only".into()],
            payoff: vec![vec![4.0], vec![9.0], vec![1.0]],
            probabilities: None,
        };
        let (_, decision) = minimax_regret_decision(&payoffs).unwrap();
        assert_eq!(decision, 1);
    }

    #[test]
    fn minimax_regret_invariant_under_column_shift() {
        let base = two_by_two();
        let (_, baseline) = minimax_regret_decision(&base).unwrap();
        let mut shifted = base.clone();
        for row in shifted.payoff.iter_mut() {
            row[1] += 77.0; // shift scenario 2's column
        }
        let (_, decision) = minimax_regret_decision(&shifted).unwrap();
        assert_eq!(decision, baseline);
    }

    #[test]
    fn expected_value_choice_small_case() {
        let mut payoffs = two_by_two();
        payoffs.probabilities = Some(vec![0.5, 0.5]);
        let (values, decision) = expected_value_choice(&payoffs).unwrap();
        assert_eq!(values, vec![6.0, 5.5]);
        assert_eq!(decision, 0);
    }

    #[test]
    fn expected_value_degenerate_probability() {
        let mut payoffs = two_by_two();
        payoffs.probabilities = Some(vec![1.0, 0.0]);
        let (_, decision) = expected_value_choice(&payoffs).unwrap();
        assert_eq!(decision, 0, "argmax of the first column");
    }

    #[test]
    fn expected_value_identical_rows_tie_to_first() {
        let payoffs = ScenarioPayoff {
            actions: vec!["A1".into(), "A2".into()],
            scenarios: vec!["s1".into()],
            payoff: vec![vec![5.0], vec![5.0]],
            probabilities: Some(vec![1.0]),
        };
        let (_, decision) = expected_value_choice(&payoffs).unwrap();
        assert_eq!(decision, 0);
    }

    #[test]
    fn expected_value_without_probabilities_is_error() {
        assert!(matches!(
            expected_value_choice(&two_by_two()),
            Err(Error::MissingProbabilities)
        ));
    }

    #[test]
    fn cost_comparison_can_prefer_the_less_accurate_model() {
        // misses at $200, false alarms at $20: model A's fewer misses win
        // even though model B is more accurate
        let costs = UnitCosts { type_i: 20.0, type_ii: 200.0, correct: 0.0 };
        let (totals, best) =
            compare_models_by_cost(&[model_a(), model_b()], costs).unwrap();
        assert_eq!(totals, vec![29.0 * 20.0 + 7.0 * 200.0, 7.0 * 20.0 + 21.0 * 200.0]);
        assert_eq!(totals, vec![1980.0, 4340.0]);
        assert_eq!(best, 0);

        // with symmetric unit costs the accuracy maximizer wins instead
        let flat = UnitCosts { type_i: 1.0, type_ii: 1.0, correct: 0.0 };
        let (_, best) = compare_models_by_cost(&[model_a(), model_b()], flat).unwrap();
        assert_eq!(best, 1);
    }

    #[test]
    fn free_misses_reward_fewest_false_alarms() {
        let costs = UnitCosts { type_i: 1.0, type_ii: 0.0, correct: 0.0 };
        let (_, best) = compare_models_by_cost(&[model_a(), model_b()], costs).unwrap();
        assert_eq!(best, 1, "model B has 7 false alarms to model A's 29");
    }

    #[test]
    fn mismatched_positive_labels_are_rejected() {
        let other = ConfusionMatrix::from_counts("Defect", 1, 2, 3, 4);
        assert!(matches!(
            compare_models_by_cost(
                &[model_a(), other],
                UnitCosts { type_i: 1.0, type_ii: 1.0, correct: 0.0 }
            ),
            Err(Error::PositiveLabelMismatch(..))
        ));
    }
}
