//! Dense least squares via column-pivoted Householder QR, with rank
//! detection. Small-matrix scale only; column-major layout throughout.

use crate::error::{Error, Result};
use crate::scalar::{from_count, real, Real};

/// Relative pivot tolerance for rank decisions.
const PIVOT_TOL: f64 = 1e-10;

/// An intercept-included least-squares fit.
#[derive(Debug, Clone)]
pub struct LinearFit<F> {
    /// One coefficient per predictor column, in input order.
    pub coefficients: Vec<F>,
    pub intercept: F,
    /// Residual sum of squares, recomputed from the coefficients.
    pub rss: F,
    /// 1 − RSS/TSS; 0 when the response is constant.
    pub r_squared: F,
    /// Rank of the design matrix including the intercept column.
    pub rank: usize,
    pub rank_deficient: bool,
}

/// Minimizes ‖y − (β₀ + Xβ)‖². Rank-deficient designs get a basic solution
/// (dependent columns pinned to zero) and are flagged.
pub fn least_squares_fit<F: Real>(predictors: &[Vec<F>], y: &[F]) -> Result<LinearFit<F>> {
    let n = y.len();
    let p = predictors.len();
    for column in predictors {
        if column.len() != n {
            return Err(Error::InvalidParameter(format!(
                "predictor length {} does not match response length {}",
                column.len(),
                n
            )));
        }
    }
    if n < p + 1 {
        return Err(Error::TooFewObservations { needed: p + 1, got: n });
    }

    // Design: intercept column of ones, then predictors.
    let mut design: Vec<Vec<F>> = Vec::with_capacity(p + 1);
    design.push(vec![F::one(); n]);
    design.extend(predictors.iter().cloned());
    let beta = qr_solve(design, y)?;

    let intercept = beta.solution[0];
    let coefficients: Vec<F> = beta.solution[1..].to_vec();

    let mut rss = F::zero();
    for row in 0..n {
        let mut fitted = intercept;
        for (j, column) in predictors.iter().enumerate() {
            fitted = fitted + coefficients[j] * column[row];
        }
        let r = y[row] - fitted;
        rss = rss + r * r;
    }

    let mean = y.iter().copied().sum::<F>() / from_count(n);
    let tss = y.iter().map(|&v| (v - mean) * (v - mean)).sum::<F>();
    let r_squared = if tss > F::zero() { (F::one() - rss / tss).min(F::one()) } else { F::zero() };

    Ok(LinearFit {
        coefficients,
        intercept,
        rss,
        r_squared,
        rank: beta.rank,
        rank_deficient: beta.rank < p + 1,
    })
}

/// As [`least_squares_fit`] but rejects rank-deficient designs.
pub fn least_squares_fit_unique<F: Real>(predictors: &[Vec<F>], y: &[F]) -> Result<LinearFit<F>> {
    let fit = least_squares_fit(predictors, y)?;
    if fit.rank_deficient {
        return Err(Error::RankDeficient { rank: fit.rank, columns: predictors.len() + 1 });
    }
    Ok(fit)
}

struct QrSolution<F> {
    solution: Vec<F>,
    rank: usize,
}

/// Column-pivoted Householder QR; returns the basic least-squares solution
/// in original column order and the numerical rank.
fn qr_solve<F: Real>(mut a: Vec<Vec<F>>, y: &[F]) -> Result<QrSolution<F>> {
    let n = y.len();
    let m = a.len();
    let steps = m.min(n);
    let mut b = y.to_vec();
    let mut perm: Vec<usize> = (0..m).collect();
    let mut diag: Vec<F> = Vec::with_capacity(steps);

    for k in 0..steps {
        // Pivot: move the column with the largest remaining norm to position k.
        let mut best = k;
        let mut best_norm = F::zero();
        for j in k..m {
            let norm = a[j][k..].iter().map(|&v| v * v).sum::<F>();
            if norm > best_norm {
                best_norm = norm;
                best = j;
            }
        }
        a.swap(k, best);
        perm.swap(k, best);

        let norm = best_norm.sqrt();
        if norm == F::zero() {
            diag.push(F::zero());
            continue;
        }
        // Householder vector for a[k][k..].
        let alpha = if a[k][k] >= F::zero() { -norm } else { norm };
        let mut v: Vec<F> = a[k][k..].to_vec();
        v[0] = v[0] - alpha;
        let vtv = v.iter().map(|&x| x * x).sum::<F>();
        if vtv > F::zero() {
            let two: F = real(2.0);
            for j in k..m {
                let dot = v.iter().zip(&a[j][k..]).map(|(&vi, &ci)| vi * ci).sum::<F>();
                let w = two * dot / vtv;
                for (i, vi) in v.iter().enumerate() {
                    a[j][k + i] = a[j][k + i] - w * *vi;
                }
            }
            let dot = v.iter().zip(&b[k..]).map(|(&vi, &bi)| vi * bi).sum::<F>();
            let w = two * dot / vtv;
            for (i, vi) in v.iter().enumerate() {
                b[k + i] = b[k + i] - w * *vi;
            }
        }
        a[k][k] = alpha;
        diag.push(alpha);
    }

    // Numerical rank: pivoting makes |diag| non-increasing in exact arithmetic.
    let tol: F = real(PIVOT_TOL);
    let largest = diag.first().map(|d| d.abs()).unwrap_or_else(F::zero);
    let threshold = largest * tol;
    let mut rank = 0;
    for d in &diag {
        if d.abs() > threshold && largest > F::zero() {
            rank += 1;
        } else {
            break;
        }
    }

    // Back substitution over the leading rank×rank block.
    let mut x_perm = vec![F::zero(); m];
    for i in (0..rank).rev() {
        let mut acc = b[i];
        for j in (i + 1)..rank {
            acc = acc - a[j][i] * x_perm[j];
        }
        x_perm[i] = acc / a[i][i];
    }

    let mut solution = vec![F::zero(); m];
    for (pos, &orig) in perm.iter().enumerate() {
        solution[orig] = x_perm[pos];
    }
    Ok(QrSolution { solution, rank })
}
