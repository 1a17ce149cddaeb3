//! Axis-aligned CART-style trees with impurity-based importance, shared by
//! the random forest and boosting selectors.
//!
//! Splits are `value ≤ threshold` with midpoint thresholds between distinct
//! sorted values; categorical predictors enter as integer level codes, so
//! level order matters (documented limitation, avoids exponential subset
//! search). Variance impurity for regression, Gini for classification.

use rand_chacha::ChaCha8Rng;

use crate::scalar::{from_count, real, Real};

#[derive(Debug, Clone, Copy)]
pub enum TreeTarget<'a, F> {
    Regression(&'a [F]),
    Classification { labels: &'a [u32], classes: usize },
}

#[derive(Debug, Clone, Copy)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Features sampled per node; `None` considers all.
    pub feature_sample: Option<usize>,
}

#[derive(Debug, Clone)]
enum Node<F> {
    Leaf { prediction: F },
    Split { feature: usize, threshold: F, left: usize, right: usize },
}

#[derive(Debug, Clone)]
pub struct DecisionTree<F> {
    nodes: Vec<Node<F>>,
}

impl<F: Real> DecisionTree<F> {
    /// Grows a tree over `rows`, adding each split's impurity decrease times
    /// its node fraction (relative to `rows.len()`) into `importance`.
    pub fn fit(
        columns: &[Vec<F>],
        rows: &[usize],
        target: &TreeTarget<'_, F>,
        params: &TreeParams,
        rng: &mut ChaCha8Rng,
        importance: &mut [F],
    ) -> DecisionTree<F> {
        let mut builder = Builder {
            columns,
            target,
            params,
            rng,
            importance,
            total: rows.len(),
            nodes: Vec::new(),
        };
        builder.grow(rows.to_vec(), 0);
        DecisionTree { nodes: builder.nodes }
    }

    pub fn predict(&self, features: &[F]) -> F {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                Node::Leaf { prediction } => return *prediction,
                Node::Split { feature, threshold, left, right } => {
                    at = if features[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }
}

struct Builder<'a, F> {
    columns: &'a [Vec<F>],
    target: &'a TreeTarget<'a, F>,
    params: &'a TreeParams,
    rng: &'a mut ChaCha8Rng,
    importance: &'a mut [F],
    total: usize,
    nodes: Vec<Node<F>>,
}

struct NodeSummary<F> {
    impurity: F,
    prediction: F,
}

impl<F: Real> Builder<'_, F> {
    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let summary = self.summarize(&rows);
        let splittable = depth < self.params.max_depth
            && rows.len() >= 2 * self.params.min_leaf
            && summary.impurity > F::zero();
        if !splittable {
            return self.push_leaf(summary.prediction);
        }
        match self.best_split(&rows, summary.impurity) {
            None => self.push_leaf(summary.prediction),
            Some(split) => {
                let fraction = from_count::<F>(rows.len()) / from_count::<F>(self.total);
                self.importance[split.feature] =
                    self.importance[split.feature] + split.decrease * fraction;
                let column = &self.columns[split.feature];
                let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
                    rows.into_iter().partition(|&r| column[r] <= split.threshold);
                // reserve the slot so children indices are stable
                let index = self.push_leaf(summary.prediction);
                let left = self.grow(left_rows, depth + 1);
                let right = self.grow(right_rows, depth + 1);
                self.nodes[index] =
                    Node::Split { feature: split.feature, threshold: split.threshold, left, right };
                index
            }
        }
    }

    fn push_leaf(&mut self, prediction: F) -> usize {
        self.nodes.push(Node::Leaf { prediction });
        self.nodes.len() - 1
    }

    fn summarize(&self, rows: &[usize]) -> NodeSummary<F> {
        let n: F = from_count(rows.len());
        match self.target {
            TreeTarget::Regression(y) => {
                let sum = rows.iter().map(|&r| y[r]).sum::<F>();
                let mean = sum / n;
                let var = rows.iter().map(|&r| (y[r] - mean) * (y[r] - mean)).sum::<F>() / n;
                NodeSummary { impurity: var.max(F::zero()), prediction: mean }
            }
            TreeTarget::Classification { labels, classes } => {
                let mut counts = vec![0usize; *classes];
                for &r in rows {
                    counts[labels[r] as usize] += 1;
                }
                let gini = F::one()
                    - counts
                        .iter()
                        .map(|&c| {
                            let p = from_count::<F>(c) / n;
                            p * p
                        })
                        .sum::<F>();
                let majority = counts
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
                    .map(|(class, _)| class)
                    .unwrap_or(0);
                NodeSummary { impurity: gini.max(F::zero()), prediction: from_count(majority) }
            }
        }
    }

    fn best_split(&mut self, rows: &[usize], parent_impurity: F) -> Option<SplitChoice<F>> {
        let candidates = self.sample_features();
        let mut best: Option<SplitChoice<F>> = None;
        for feature in candidates {
            if let Some(candidate) = self.scan_feature(feature, rows, parent_impurity) {
                let better = match &best {
                    None => candidate.decrease > F::zero(),
                    Some(current) => candidate.decrease > current.decrease,
                };
                if better {
                    best = Some(candidate);
                }
            }
        }
        best
    }

    /// Distinct feature indices, ascending so ties resolve by column order.
    fn sample_features(&mut self) -> Vec<usize> {
        let p = self.columns.len();
        match self.params.feature_sample {
            Some(m) if m < p => {
                use rand::Rng;
                let mut pool: Vec<usize> = (0..p).collect();
                for i in 0..m {
                    let j = self.rng.random_range(i..p);
                    pool.swap(i, j);
                }
                let mut picked: Vec<usize> = pool[..m].to_vec();
                picked.sort_unstable();
                picked
            }
            _ => (0..p).collect(),
        }
    }

    fn scan_feature(
        &self,
        feature: usize,
        rows: &[usize],
        parent_impurity: F,
    ) -> Option<SplitChoice<F>> {
        let column = &self.columns[feature];
        let mut order: Vec<usize> = rows.to_vec();
        order.sort_by(|&a, &b| column[a].partial_cmp(&column[b]).expect("finite features"));
        let n = order.len();
        let nf: F = from_count(n);
        let min_leaf = self.params.min_leaf;

        let mut best: Option<SplitChoice<F>> = None;
        let mut consider = |i: usize, weighted_child: F| {
            // split between order[i-1] and order[i]
            let threshold =
                (column[order[i - 1]] + column[order[i]]) / real::<F>(2.0);
            let decrease = parent_impurity - weighted_child;
            if best.as_ref().map_or(true, |b| decrease > b.decrease) {
                best = Some(SplitChoice { feature, threshold, decrease });
            }
        };

        match self.target {
            TreeTarget::Regression(y) => {
                let total_sum = order.iter().map(|&r| y[r]).sum::<F>();
                let total_sq = order.iter().map(|&r| y[r] * y[r]).sum::<F>();
                let mut left_sum = F::zero();
                let mut left_sq = F::zero();
                for i in 1..n {
                    let v = y[order[i - 1]];
                    left_sum = left_sum + v;
                    left_sq = left_sq + v * v;
                    if i < min_leaf || n - i < min_leaf {
                        continue;
                    }
                    if column[order[i]] == column[order[i - 1]] {
                        continue;
                    }
                    let nl: F = from_count(i);
                    let nr: F = from_count(n - i);
                    let var_l = (left_sq / nl - (left_sum / nl) * (left_sum / nl)).max(F::zero());
                    let right_sum = total_sum - left_sum;
                    let right_sq = total_sq - left_sq;
                    let var_r =
                        (right_sq / nr - (right_sum / nr) * (right_sum / nr)).max(F::zero());
                    consider(i, (nl * var_l + nr * var_r) / nf);
                }
            }
            TreeTarget::Classification { labels, classes } => {
                let mut total = vec![0usize; *classes];
                for &r in &order {
                    total[labels[r] as usize] += 1;
                }
                let mut left = vec![0usize; *classes];
                for i in 1..n {
                    left[labels[order[i - 1]] as usize] += 1;
                    if i < min_leaf || n - i < min_leaf {
                        continue;
                    }
                    if column[order[i]] == column[order[i - 1]] {
                        continue;
                    }
                    let nl: F = from_count(i);
                    let nr: F = from_count(n - i);
                    let gini = |counts: &[usize], side_n: F| {
                        F::one()
                            - counts
                                .iter()
                                .map(|&c| {
                                    let p = from_count::<F>(c) / side_n;
                                    p * p
                                })
                                .sum::<F>()
                    };
                    let gini_l = gini(&left, nl);
                    let right: Vec<usize> =
                        total.iter().zip(&left).map(|(t, l)| t - l).collect();
                    let gini_r = gini(&right, nr);
                    consider(i, (nl * gini_l + nr * gini_r) / nf);
                }
            }
        }
        best.filter(|b| b.decrease > F::zero())
    }
}

struct SplitChoice<F> {
    feature: usize,
    threshold: F,
    decrease: F,
}
