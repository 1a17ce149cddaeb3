//! Greedy forward stepwise selection under AIC.

use crate::error::{Error, Result};
use crate::scalar::{from_count, Real};
use crate::stats::least_squares_fit;

/// AIC = n·ln(RSS/n) + 2(k+1) for a k-predictor model with intercept.
fn aic<F: Real>(rss: F, n: usize, k: usize) -> F {
    let floor: F = crate::scalar::real(1e-300);
    let nf: F = from_count(n);
    nf * (rss.max(floor) / nf).ln() + from_count::<F>(2 * (k + 1))
}

#[derive(Debug, Clone)]
pub struct StepwiseOutcome<F> {
    /// Selected column indices, in inclusion order.
    pub selected: Vec<usize>,
    /// AIC of the final model.
    pub aic: F,
    /// AIC improvement each selected variable delivered when added.
    pub improvements: Vec<(usize, F)>,
    /// Zero-variance candidates, skipped rather than tested.
    pub skipped_constant: Vec<usize>,
}

/// Starts from the empty model and keeps adding the variable that lowers AIC
/// the most; stops when no addition improves. Ties go to the lower column
/// index.
pub fn forward_stepwise<F: Real>(columns: &[Vec<F>], y: &[F]) -> Result<StepwiseOutcome<F>> {
    let n = y.len();
    if n < 2 {
        return Err(Error::TooFewObservations { needed: 2, got: n });
    }
    let mean = y.iter().copied().sum::<F>() / from_count(n);
    let tss = y.iter().map(|&v| (v - mean) * (v - mean)).sum::<F>();
    let mut current_aic = aic(tss, n, 0);

    let mut skipped_constant = Vec::new();
    let mut usable = vec![false; columns.len()];
    for (j, column) in columns.iter().enumerate() {
        let m = column.iter().copied().sum::<F>() / from_count(n);
        let var = column.iter().map(|&v| (v - m) * (v - m)).sum::<F>();
        if var == F::zero() {
            skipped_constant.push(j);
        } else {
            usable[j] = true;
        }
    }

    let mut selected: Vec<usize> = Vec::new();
    let mut improvements = Vec::new();
    loop {
        // the fit needs n ≥ (selected + candidate) + intercept
        if n < selected.len() + 2 {
            break;
        }
        let mut best: Option<(usize, F)> = None;
        for j in 0..columns.len() {
            if !usable[j] || selected.contains(&j) {
                continue;
            }
            let mut design: Vec<Vec<F>> =
                selected.iter().map(|&s| columns[s].clone()).collect();
            design.push(columns[j].clone());
            let fit = least_squares_fit(&design, y)?;
            let candidate_aic = aic(fit.rss, n, selected.len() + 1);
            if best.map_or(true, |(_, a)| candidate_aic < a) {
                best = Some((j, candidate_aic));
            }
        }
        match best {
            Some((j, a)) if a < current_aic => {
                improvements.push((j, current_aic - a));
                selected.push(j);
                current_aic = a;
            }
            _ => break,
        }
    }

    Ok(StepwiseOutcome { selected, aic: current_aic, improvements, skipped_constant })
}
