//! Combining selector outputs by voting: one row per variable anyone picked,
//! ranked by vote count.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::Scalar;

/// One variable-selection technique in the ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SelectorId {
    Stepwise,
    Lasso,
    RandomForest,
    Boosting,
}

impl SelectorId {
    pub fn label(self) -> &'static str {
        match self {
            SelectorId::Stepwise => "stepwise",
            SelectorId::Lasso => "lasso",
            SelectorId::RandomForest => "random_forest",
            SelectorId::Boosting => "boosting",
        }
    }
}

/// What one selector chose, plus its per-variable scores (AIC improvement,
/// |coefficient|, or importance — larger is better).
#[derive(Debug, Clone)]
pub struct SelectorResult {
    pub selector: SelectorId,
    pub selected: Vec<String>,
    pub scores: Vec<(String, Scalar)>,
}

/// One line of the voting table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VoteRow {
    pub variable: String,
    /// Selection flag per selector, in the table's selector order.
    pub flags: Vec<bool>,
    pub votes: usize,
    /// Mean normalized score rank across selectors (0 best, 1 worst);
    /// the vote-count tiebreaker.
    pub mean_rank: Scalar,
    /// Kept from a previous round for engineering validation that has not
    /// confirmed or rejected it yet.
    pub pending: bool,
}

/// The voting table: variables ranked by votes, then mean score rank, then
/// name, which makes the ordering total and deterministic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VoteTable {
    pub selectors: Vec<SelectorId>,
    pub rows: Vec<VoteRow>,
}

impl VoteTable {
    pub fn truncated(mut self, cap: usize) -> VoteTable {
        self.rows.truncate(cap);
        self
    }
}

/// Builds the voting table from at least two selector results.
pub fn vote(results: &[SelectorResult]) -> Result<VoteTable> {
    if results.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "voting needs at least 2 selector results, got {}",
            results.len()
        )));
    }
    for (i, result) in results.iter().enumerate() {
        if results[..i].iter().any(|other| other.selector == result.selector) {
            return Err(Error::DuplicateSelector(result.selector.label().to_string()));
        }
    }

    // normalized rank per selector: position in (score desc, name asc) order,
    // scaled to [0, 1]; variables a selector never scored rank worst (1)
    let rank_tables: Vec<std::collections::HashMap<&str, Scalar>> = results
        .iter()
        .map(|result| {
            let mut order: Vec<(&str, Scalar)> =
                result.scores.iter().map(|(name, s)| (name.as_str(), *s)).collect();
            order.sort_by(|a, b| {
                b.1.partial_cmp(&a.1).expect("finite scores").then(a.0.cmp(b.0))
            });
            let count = order.len();
            order
                .into_iter()
                .enumerate()
                .map(|(pos, (name, _))| {
                    let rank = if count > 1 {
                        pos as Scalar / (count - 1) as Scalar
                    } else {
                        0.0
                    };
                    (name, rank)
                })
                .collect()
        })
        .collect();

    let mut variables: Vec<String> = Vec::new();
    for result in results {
        for name in &result.selected {
            if !variables.contains(name) {
                variables.push(name.clone());
            }
        }
    }

    let mut rows: Vec<VoteRow> = variables
        .into_iter()
        .map(|variable| {
            let flags: Vec<bool> =
                results.iter().map(|r| r.selected.contains(&variable)).collect();
            let votes = flags.iter().filter(|&&f| f).count();
            let mean_rank = rank_tables
                .iter()
                .map(|table| table.get(variable.as_str()).copied().unwrap_or(1.0))
                .sum::<Scalar>()
                / results.len() as Scalar;
            VoteRow { variable, flags, votes, mean_rank, pending: false }
        })
        .collect();
    rows.sort_by(|a, b| {
        b.votes
            .cmp(&a.votes)
            .then(a.mean_rank.partial_cmp(&b.mean_rank).expect("finite ranks"))
            .then(a.variable.cmp(&b.variable))
    });
    Ok(VoteTable { selectors: results.iter().map(|r| r.selector).collect(), rows })
}
