//! Gradient boosting with squared loss on shallow regression trees,
//! accumulating the same impurity-decrease importance as the forest.

use crate::error::{Error, Result};
use crate::scalar::{from_count, real, Real};
use crate::select::forest::{normalize_and_select, ImportanceOutcome};
use crate::select::kfold::{derive_seed, seeded_rng};
use crate::select::tree::{DecisionTree, TreeParams, TreeTarget};

#[derive(Debug, Clone, Copy)]
pub struct BoostParams {
    pub rounds: usize,
    /// Learning rate; must stay in (0, 2) for the training MSE to be
    /// non-increasing round over round.
    pub rate: f64,
    pub depth: usize,
    pub seed: u64,
    pub top_k: usize,
}

impl Default for BoostParams {
    fn default() -> Self {
        BoostParams { rounds: 100, rate: 0.1, depth: 2, seed: 0, top_k: 20 }
    }
}

#[derive(Debug, Clone)]
pub struct BoostOutcome<F> {
    pub importance: Vec<F>,
    pub selected: Vec<usize>,
    /// Training MSE before any round, then after each round.
    pub train_mse: Vec<F>,
    /// Final per-row predictions (the target mean when rounds = 0).
    pub predictions: Vec<F>,
}

/// Fits residuals with depth-capped regression trees, stepping predictions by
/// `rate` per round. Stops early once residuals are numerically constant.
pub fn boosted_trees_importance<F: Real>(
    columns: &[Vec<F>],
    y: &[F],
    params: &BoostParams,
) -> Result<BoostOutcome<F>> {
    let n = y.len();
    let p = columns.len();
    if n < 2 {
        return Err(Error::TooFewObservations { needed: 2, got: n });
    }
    if !(params.rate > 0.0 && params.rate < 2.0) {
        return Err(Error::InvalidParameter(format!(
            "boosting rate must lie in (0, 2), got {}",
            params.rate
        )));
    }
    let rate: F = real(params.rate);
    let nf: F = from_count(n);
    let mean = y.iter().copied().sum::<F>() / nf;
    let mut predictions = vec![mean; n];
    let mut residual: Vec<F> = y.iter().map(|&v| v - mean).collect();

    let mse = |res: &[F]| res.iter().map(|&r| r * r).sum::<F>() / nf;
    let mut train_mse = vec![mse(&residual)];

    let tree_params =
        TreeParams { max_depth: params.depth, min_leaf: 1, feature_sample: None };
    let rows: Vec<usize> = (0..n).collect();
    let mut importance = vec![F::zero(); p];
    let tiny: F = real(1e-24);
    for round in 0..params.rounds {
        let res_mean = residual.iter().copied().sum::<F>() / nf;
        let res_var =
            residual.iter().map(|&r| (r - res_mean) * (r - res_mean)).sum::<F>() / nf;
        if res_var <= tiny {
            break;
        }
        let mut rng = seeded_rng(derive_seed(params.seed, round as u64));
        let tree = DecisionTree::fit(
            columns,
            &rows,
            &TreeTarget::Regression(&residual),
            &tree_params,
            &mut rng,
            &mut importance,
        );
        let mut features = vec![F::zero(); p];
        for i in 0..n {
            for (j, column) in columns.iter().enumerate() {
                features[j] = column[i];
            }
            let step = rate * tree.predict(&features);
            predictions[i] = predictions[i] + step;
            residual[i] = y[i] - predictions[i];
        }
        train_mse.push(mse(&residual));
    }

    let ImportanceOutcome { importance, selected } =
        normalize_and_select(importance, params.top_k)?;
    Ok(BoostOutcome { importance, selected, train_mse, predictions })
}
