//! LASSO by cyclic coordinate descent with soft thresholding, plus k-fold
//! cross-validated λ choice.
//!
//! Objective: (1/2n)·‖y − β₀ − Xβ‖² + λ·Σ|βⱼ|. Columns are standardized to
//! zero mean and unit (population) variance internally; returned
//! coefficients are on the original scale.

use crate::error::{Error, Result};
use crate::scalar::{from_count, real, Real};
use crate::select::kfold::{derive_seed, kfold_indices};

const MAX_SWEEPS: usize = 10_000;
const TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct LassoFit<F> {
    /// Original-scale coefficient per column; exactly zero when shrunk away.
    pub coefficients: Vec<F>,
    pub intercept: F,
    pub sweeps: usize,
}

struct Standardized<F> {
    z: Vec<Vec<F>>,
    mean: Vec<F>,
    scale: Vec<F>,
    y_centered: Vec<F>,
    y_mean: F,
}

fn standardize<F: Real>(columns: &[Vec<F>], y: &[F]) -> Standardized<F> {
    let n = y.len();
    let nf: F = from_count(n);
    let mut z = Vec::with_capacity(columns.len());
    let mut mean = Vec::with_capacity(columns.len());
    let mut scale = Vec::with_capacity(columns.len());
    for column in columns {
        let m = column.iter().copied().sum::<F>() / nf;
        let var = column.iter().map(|&v| (v - m) * (v - m)).sum::<F>() / nf;
        let s = var.sqrt();
        if s > F::zero() {
            z.push(column.iter().map(|&v| (v - m) / s).collect());
        } else {
            // constant column: contributes nothing, coefficient stays zero
            z.push(vec![F::zero(); n]);
        }
        mean.push(m);
        scale.push(s);
    }
    let y_mean = y.iter().copied().sum::<F>() / nf;
    let y_centered = y.iter().map(|&v| v - y_mean).collect();
    Standardized { z, mean, scale, y_centered, y_mean }
}

/// Smallest λ that shrinks every coefficient to zero:
/// max_j |zⱼᵀ y_centered| / n over the standardized columns.
pub fn lasso_lambda_max<F: Real>(columns: &[Vec<F>], y: &[F]) -> F {
    let st = standardize(columns, y);
    let nf: F = from_count(y.len());
    st.z
        .iter()
        .map(|zj| {
            zj.iter().zip(&st.y_centered).map(|(&a, &b)| a * b).sum::<F>().abs() / nf
        })
        .fold(F::zero(), F::max)
}

/// Cyclic coordinate descent at one λ. Converges when the largest
/// standardized-coefficient update in a sweep drops below 1e-6; errors after
/// 10,000 sweeps with the final gap.
pub fn lasso_coordinate_descent<F: Real>(
    columns: &[Vec<F>],
    y: &[F],
    lambda: F,
) -> Result<LassoFit<F>> {
    if lambda < F::zero() {
        return Err(Error::InvalidParameter("lambda must be non-negative".into()));
    }
    let n = y.len();
    if n < 2 {
        return Err(Error::TooFewObservations { needed: 2, got: n });
    }
    let st = standardize(columns, y);
    let p = st.z.len();
    let nf: F = from_count(n);
    let tol: F = real(TOLERANCE);

    let mut beta = vec![F::zero(); p];
    let mut residual = st.y_centered.clone();
    let mut sweeps = 0;
    let mut gap = F::infinity();
    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut max_delta = F::zero();
        for j in 0..p {
            if st.scale[j] == F::zero() {
                continue;
            }
            // zⱼᵀzⱼ = n under unit population variance
            let rho =
                st.z[j].iter().zip(&residual).map(|(&a, &b)| a * b).sum::<F>() / nf + beta[j];
            let updated = soft_threshold(rho, lambda);
            let delta = updated - beta[j];
            if delta != F::zero() {
                for (r, &zij) in residual.iter_mut().zip(&st.z[j]) {
                    *r = *r - delta * zij;
                }
                beta[j] = updated;
            }
            max_delta = max_delta.max(delta.abs());
        }
        gap = max_delta;
        if max_delta < tol {
            let coefficients: Vec<F> = beta
                .iter()
                .zip(&st.scale)
                .map(|(&b, &s)| if s > F::zero() { b / s } else { F::zero() })
                .collect();
            let offset: F = coefficients
                .iter()
                .zip(&st.mean)
                .map(|(&c, &m)| c * m)
                .sum();
            return Ok(LassoFit { coefficients, intercept: st.y_mean - offset, sweeps });
        }
    }
    Err(Error::NoConvergence { sweeps, gap: gap.to_f64().unwrap_or(f64::NAN) })
}

fn soft_threshold<F: Real>(value: F, lambda: F) -> F {
    if value > lambda {
        value - lambda
    } else if value < -lambda {
        value + lambda
    } else {
        F::zero()
    }
}

/// Cross-validated λ choice and final selection.
#[derive(Debug, Clone)]
pub struct LassoCvOutcome<F> {
    pub chosen_lambda: F,
    /// (λ, mean validation MSE) over the grid, in grid order.
    pub curve: Vec<(F, F)>,
    /// Full-data refit at the chosen λ.
    pub fit: LassoFit<F>,
    /// Column indices with nonzero coefficient at the chosen λ.
    pub selected: Vec<usize>,
}

/// Picks the λ minimizing mean k-fold validation MSE (exact ties go to the
/// larger λ), refits on all rows, and reports the surviving columns.
///
/// The default grid is 50 log-spaced values in [1e-4·λ_max, λ_max].
pub fn lasso_select_cv<F: Real>(
    columns: &[Vec<F>],
    y: &[F],
    lambda_grid: Option<&[F]>,
    k: usize,
    seed: u64,
) -> Result<LassoCvOutcome<F>> {
    let n = y.len();
    if n < 2 * k {
        return Err(Error::TooFewObservations { needed: 2 * k, got: n });
    }
    let grid: Vec<F> = match lambda_grid {
        Some(g) => g.to_vec(),
        None => default_grid(columns, y),
    };
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty lambda grid".into()));
    }

    let folds = kfold_indices(n, k, derive_seed(seed, 0xf01d))?;
    let mut curve = Vec::with_capacity(grid.len());
    let mut best: Option<(F, F)> = None; // (mse, lambda)
    for &lambda in &grid {
        let mut total_sq_error = F::zero();
        let mut total_count = 0usize;
        for fold in &folds {
            let holdout: std::collections::HashSet<usize> = fold.iter().copied().collect();
            let train_rows: Vec<usize> = (0..n).filter(|r| !holdout.contains(r)).collect();
            let train_cols: Vec<Vec<F>> = columns
                .iter()
                .map(|c| train_rows.iter().map(|&r| c[r]).collect())
                .collect();
            let train_y: Vec<F> = train_rows.iter().map(|&r| y[r]).collect();
            let fit = lasso_coordinate_descent(&train_cols, &train_y, lambda)?;
            for &r in fold {
                let mut pred = fit.intercept;
                for (j, c) in columns.iter().enumerate() {
                    pred = pred + fit.coefficients[j] * c[r];
                }
                let e = y[r] - pred;
                total_sq_error = total_sq_error + e * e;
            }
            total_count += fold.len();
        }
        let mse = total_sq_error / from_count(total_count);
        curve.push((lambda, mse));
        let better = match best {
            None => true,
            Some((best_mse, best_lambda)) => {
                mse < best_mse || (mse == best_mse && lambda > best_lambda)
            }
        };
        if better {
            best = Some((mse, lambda));
        }
    }
    let (_, chosen_lambda) = best.expect("non-empty grid");
    let fit = lasso_coordinate_descent(columns, y, chosen_lambda)?;
    let selected = fit
        .coefficients
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != F::zero())
        .map(|(j, _)| j)
        .collect();
    Ok(LassoCvOutcome { chosen_lambda, curve, fit, selected })
}

fn default_grid<F: Real>(columns: &[Vec<F>], y: &[F]) -> Vec<F> {
    let lambda_max = lasso_lambda_max(columns, y);
    if lambda_max <= F::zero() {
        return vec![F::zero()];
    }
    let lo = lambda_max * real(1e-4);
    let ratio = (lambda_max / lo).ln();
    (0..50)
        .map(|i| lo * (ratio * from_count::<F>(i) / real(49.0)).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::least_squares_fit;
    use approx::assert_relative_eq;

    fn fixture() -> (Vec<Vec<f64>>, Vec<f64>) {
        let x1: Vec<f64> = (0..12).map(|i| (i as f64) * 0.7 - 4.0).collect();
        let x2: Vec<f64> =
            vec![0.4, -1.0, 0.8, -0.6, 1.2, -0.2, 0.9, -1.4, 0.3, 0.1, -0.8, 0.5];
        let y: Vec<f64> = x1
            .iter()
            .zip(&x2)
            .map(|(a, b)| 1.5 * a - 0.7 * b + 0.3)
            .collect();
        (vec![x1, x2], y)
    }

    #[test]
    fn zero_lambda_reduces_to_least_squares() {
        let (columns, y) = fixture();
        let lasso = lasso_coordinate_descent(&columns, &y, 0.0).unwrap();
        let ols = least_squares_fit(&columns, &y).unwrap();
        for j in 0..2 {
            assert_relative_eq!(lasso.coefficients[j], ols.coefficients[j], epsilon = 1e-6);
        }
        assert_relative_eq!(lasso.intercept, ols.intercept, epsilon = 1e-6);
    }

    #[test]
    fn lambda_max_kills_every_coefficient() {
        let (columns, y) = fixture();
        let lmax = lasso_lambda_max(&columns, &y);
        for factor in [1.0, 1.5, 10.0] {
            let fit = lasso_coordinate_descent(&columns, &y, lmax * factor).unwrap();
            assert!(fit.coefficients.iter().all(|c| *c == 0.0), "factor {factor}");
        }
    }

    #[test]
    fn single_predictor_matches_soft_threshold_closed_form() {
        // standardized x, centered unit-variance y with correlation ρ:
        // β_std(λ) = sign(ρ)·max(|ρ| − λ, 0)
        let n = 40;
        let raw_u: Vec<f64> = (0..n).map(|i| (i as f64 * 0.77).sin()).collect();
        let raw_v: Vec<f64> = (0..n).map(|i| (i as f64 * 1.31).cos()).collect();
        let center = |v: &[f64]| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            v.iter().map(|a| a - m).collect::<Vec<f64>>()
        };
        let scale = |v: &[f64]| {
            let s = (v.iter().map(|a| a * a).sum::<f64>() / v.len() as f64).sqrt();
            v.iter().map(|a| a / s).collect::<Vec<f64>>()
        };
        let u = scale(&center(&raw_u));
        let mut w = center(&raw_v);
        // remove the u component to make w ⊥ u
        let proj = u.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / n as f64;
        for (wi, &ui) in w.iter_mut().zip(&u) {
            *wi -= proj * ui;
        }
        let w = scale(&w);
        let rho: f64 = 0.63;
        let y: Vec<f64> = u
            .iter()
            .zip(&w)
            .map(|(a, b)| rho * a + (1.0 - rho * rho).sqrt() * b)
            .collect();

        for i in 0..20 {
            let lambda = i as f64 * 0.05;
            let fit = lasso_coordinate_descent(&[u.clone()], &y, lambda).unwrap();
            // u already has unit variance, so standardized = original scale
            let expected = (rho.abs() - lambda).max(0.0) * rho.signum();
            assert_relative_eq!(fit.coefficients[0], expected, epsilon = 1e-8);
        }
    }

    #[test]
    fn cv_recovers_planted_signal() {
        let n = 200;
        let mut state = 123u64;
        let mut next = move || {
            // xorshift for fixture noise
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        let signal: Vec<f64> = (0..n).map(|_| next()).collect();
        let noise_cols: Vec<Vec<f64>> =
            (0..5).map(|_| (0..n).map(|_| next()).collect()).collect();
        let y: Vec<f64> = signal.iter().map(|s| 3.0 * s + 0.01 * next()).collect();
        let mut columns = vec![signal];
        columns.extend(noise_cols);
        let out = lasso_select_cv(&columns, &y, None, 5, 42).unwrap();
        assert!(out.selected.contains(&0), "signal column must survive");
        let largest = out
            .fit
            .coefficients
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .unwrap()
            .0;
        assert_eq!(largest, 0);
    }

    #[test]
    fn grid_of_zero_selects_all_nonzero_ols_coefficients() {
        let (columns, y) = fixture();
        let out = lasso_select_cv(&columns, &y, Some(&[0.0]), 3, 7).unwrap();
        assert_eq!(out.chosen_lambda, 0.0);
        assert_eq!(out.selected, vec![0, 1]);
    }

    #[test]
    fn nonzero_count_is_monotone_on_single_predictor_path() {
        let n = 30;
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin() * 2.0).collect();
        let y: Vec<f64> = x.iter().map(|a| 0.8 * a + 0.05).collect();
        let lmax = lasso_lambda_max(&[x.clone()], &y);
        let mut previous_nonzero = usize::MAX;
        for i in 0..12 {
            let lambda = lmax * (i as f64) / 10.0; // crosses λ_max
            let fit = lasso_coordinate_descent(&[x.clone()], &y, lambda).unwrap();
            let nonzero = fit.coefficients.iter().filter(|c| **c != 0.0).count();
            assert!(nonzero <= previous_nonzero);
            previous_nonzero = nonzero;
        }
        assert_eq!(previous_nonzero, 0);
    }
}
