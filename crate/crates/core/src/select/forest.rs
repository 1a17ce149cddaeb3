//! Random-forest variable importance: bootstrap resampling plus random
//! feature subsets per node, importance normalized to sum 1.

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::select::kfold::{derive_seed, seeded_rng};
use crate::select::tree::{DecisionTree, TreeParams, TreeTarget};

#[derive(Debug, Clone, Copy)]
pub struct ForestParams {
    pub trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Features tried per node; `None` means ⌈√p⌉.
    pub m_try: Option<usize>,
    pub seed: u64,
    /// Selection keeps at most this many top-importance variables.
    pub top_k: usize,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams { trees: 200, max_depth: 8, min_leaf: 5, m_try: None, seed: 0, top_k: 20 }
    }
}

#[derive(Debug, Clone)]
pub struct ImportanceOutcome<F> {
    /// Per-feature importance; sums to 1 unless the target is degenerate.
    pub importance: Vec<F>,
    /// Indices of positive-importance features, best first, capped at top_k.
    pub selected: Vec<usize>,
}

/// Impurity-decrease importance over a seeded forest. Per-tree seeds derive
/// from `(seed, tree index)` and trees aggregate in index order, so the
/// result does not depend on any execution interleaving.
pub fn random_forest_importance<F: Real>(
    columns: &[Vec<F>],
    target: &TreeTarget<'_, F>,
    params: &ForestParams,
) -> Result<ImportanceOutcome<F>> {
    let p = columns.len();
    let n = columns.first().map(Vec::len).unwrap_or(0);
    if n < 10 {
        return Err(Error::TooFewObservations { needed: 10, got: n });
    }
    if target_is_constant(target, n) {
        return Ok(ImportanceOutcome { importance: vec![F::zero(); p], selected: Vec::new() });
    }
    let m_try = params.m_try.unwrap_or_else(|| (p as f64).sqrt().ceil() as usize).max(1);
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        min_leaf: params.min_leaf,
        feature_sample: Some(m_try),
    };

    let mut importance = vec![F::zero(); p];
    for tree_index in 0..params.trees {
        let mut rng = seeded_rng(derive_seed(params.seed, tree_index as u64));
        let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        DecisionTree::fit(columns, &rows, target, &tree_params, &mut rng, &mut importance);
    }
    normalize_and_select(importance, params.top_k)
}

pub(crate) fn target_is_constant<F: Real>(target: &TreeTarget<'_, F>, n: usize) -> bool {
    match target {
        TreeTarget::Regression(y) => y[..n].windows(2).all(|w| w[0] == w[1]),
        TreeTarget::Classification { labels, .. } => {
            labels[..n].windows(2).all(|w| w[0] == w[1])
        }
    }
}

pub(crate) fn normalize_and_select<F: Real>(
    mut importance: Vec<F>,
    top_k: usize,
) -> Result<ImportanceOutcome<F>> {
    let total = importance.iter().copied().fold(F::zero(), |a, b| a + b);
    if total > F::zero() {
        for value in importance.iter_mut() {
            *value = *value / total;
        }
    }
    let mut ranked: Vec<usize> =
        (0..importance.len()).filter(|&j| importance[j] > F::zero()).collect();
    ranked.sort_by(|&a, &b| {
        importance[b].partial_cmp(&importance[a]).expect("finite importance").then(a.cmp(&b))
    });
    ranked.truncate(top_k);
    Ok(ImportanceOutcome { importance, selected: ranked })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn wiggle(i: usize, mult: f64) -> f64 {
        ((i as f64) * mult).sin()
    }

    #[test]
    fn informative_feature_outranks_noise() {
        let n = 120;
        let x1: Vec<f64> = (0..n).map(|i| wiggle(i, 0.73) * 2.0).collect();
        let x2: Vec<f64> = (0..n).map(|i| wiggle(i, 1.91)).collect();
        let labels: Vec<u32> = x1.iter().map(|&v| (v > 0.0) as u32).collect();
        let target = TreeTarget::Classification { labels: &labels, classes: 2 };
        let params = ForestParams { trees: 50, seed: 9, ..ForestParams::default() };
        let out = random_forest_importance(&[x1, x2], &target, &params).unwrap();
        assert!(out.importance[0] > out.importance[1]);
        assert_eq!(out.selected[0], 0);
    }

    #[test]
    fn constant_target_has_zero_importance_and_empty_selection() {
        let x: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let y = vec![5.0f64; 20];
        let out = random_forest_importance(
            &[x],
            &TreeTarget::Regression(&y),
            &ForestParams::default(),
        )
        .unwrap();
        assert!(out.importance.iter().all(|v| *v == 0.0));
        assert!(out.selected.is_empty());
    }

    #[test]
    fn importance_sums_to_one() {
        let n = 60;
        let x1: Vec<f64> = (0..n).map(|i| wiggle(i, 0.37)).collect();
        let x2: Vec<f64> = (0..n).map(|i| wiggle(i, 0.91)).collect();
        let y: Vec<f64> = x1.iter().zip(&x2).map(|(a, b)| a + 0.3 * b).collect();
        let params = ForestParams { trees: 25, seed: 4, ..ForestParams::default() };
        let out =
            random_forest_importance(&[x1, x2], &TreeTarget::Regression(&y), &params).unwrap();
        let sum: f64 = out.importance.iter().sum();
        assert_relative_eq!(sum, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn same_seed_reproduces_bit_identical_importance() {
        let n = 40;
        let x1: Vec<f64> = (0..n).map(|i| wiggle(i, 0.57)).collect();
        let x2: Vec<f64> = (0..n).map(|i| wiggle(i, 1.13)).collect();
        let y: Vec<f64> = x1.iter().map(|a| 2.0 * a).collect();
        let params = ForestParams { trees: 20, seed: 77, ..ForestParams::default() };
        let a = random_forest_importance(&[x1.clone(), x2.clone()], &TreeTarget::Regression(&y), &params)
            .unwrap();
        let b = random_forest_importance(&[x1, x2], &TreeTarget::Regression(&y), &params).unwrap();
        assert_eq!(a.importance, b.importance);
        assert_eq!(a.selected, b.selected);
    }

    #[test]
    fn too_few_rows_rejected() {
        let x = vec![1.0f64; 5];
        let y = vec![1.0f64, 2.0, 1.0, 2.0, 1.0];
        assert!(matches!(
            random_forest_importance(
                &[x],
                &TreeTarget::Regression(&y),
                &ForestParams::default()
            ),
            Err(Error::TooFewObservations { .. })
        ));
    }
}
