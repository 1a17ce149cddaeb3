//! Association-test kernels: Pearson correlation, Mann-Whitney U with
//! midrank tie handling, and the chi-square independence statistic.
//!
//! Kernels take dense slices; missing-data handling happens at the table
//! layer (pairwise-complete deletion per test).

use crate::error::{Error, Result};
use crate::scalar::{from_count, real, Real};

use super::special::{chi_square_sf, std_normal_cdf};

/// Sample Pearson correlation coefficient.
///
/// Errors with [`Error::ZeroVariance`] when either input is constant, which
/// callers must route to the constant-column report instead of dropping.
pub fn pearson_r<F: Real>(x: &[F], y: &[F]) -> Result<F> {
    if x.len() != y.len() {
        return Err(Error::InvalidParameter("pearson inputs differ in length".into()));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::TooFewObservations { needed: 2, got: n });
    }
    let count: F = from_count(n);
    let mean_x = x.iter().copied().sum::<F>() / count;
    let mean_y = y.iter().copied().sum::<F>() / count;
    let mut sxx = F::zero();
    let mut syy = F::zero();
    let mut sxy = F::zero();
    for i in 0..n {
        let dx = x[i] - mean_x;
        let dy = y[i] - mean_y;
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
        sxy = sxy + dx * dy;
    }
    if sxx == F::zero() {
        return Err(Error::ZeroVariance("x".into()));
    }
    if syy == F::zero() {
        return Err(Error::ZeroVariance("y".into()));
    }
    let r = sxy / (sxx * syy).sqrt();
    Ok(r.max(-F::one()).min(F::one()))
}

/// Approximate two-sided p for a Pearson r via the Fisher z transform.
pub fn pearson_p<F: Real>(r: F, n: usize) -> F {
    if n < 4 {
        return F::one();
    }
    let z = r.atanh().abs() * from_count::<F>(n - 3).sqrt();
    two_sided(z)
}

/// Mann-Whitney U with midrank ties, normal approximation with
/// tie-corrected variance and continuity correction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MannWhitney<F> {
    /// min(U₁, U₂), the reported statistic.
    pub u: F,
    pub u1: F,
    pub u2: F,
    pub p_value: F,
}

pub fn mann_whitney_u<F: Real>(group0: &[F], group1: &[F]) -> Result<MannWhitney<F>> {
    if group0.is_empty() {
        return Err(Error::EmptyGroup(0));
    }
    if group1.is_empty() {
        return Err(Error::EmptyGroup(1));
    }
    let n0 = group0.len();
    let n1 = group1.len();
    let n = n0 + n1;

    let mut combined: Vec<(F, usize)> = group0
        .iter()
        .map(|&v| (v, 0usize))
        .chain(group1.iter().map(|&v| (v, 1usize)))
        .collect();
    combined.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("no NaN in test input"));

    // midranks plus Σ(t³ − t) over tie groups
    let mut rank_sum0 = F::zero();
    let mut tie_term = F::zero();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && combined[j + 1].0 == combined[i].0 {
            j += 1;
        }
        let t = j - i + 1;
        // average of ranks i+1 ..= j+1
        let midrank = (from_count::<F>(i + 1) + from_count::<F>(j + 1)) / real(2.0);
        for item in &combined[i..=j] {
            if item.1 == 0 {
                rank_sum0 = rank_sum0 + midrank;
            }
        }
        if t > 1 {
            let tf: F = from_count(t);
            tie_term = tie_term + tf * tf * tf - tf;
        }
        i = j + 1;
    }

    let n0f: F = from_count(n0);
    let n1f: F = from_count(n1);
    let nf: F = from_count(n);
    let u1 = rank_sum0 - n0f * (n0f + F::one()) / real(2.0);
    let u2 = n0f * n1f - u1;
    let u = u1.min(u2);

    let mean = n0f * n1f / real(2.0);
    let var = n0f * n1f / real(12.0)
        * ((nf + F::one()) - tie_term / (nf * (nf - F::one())));
    let p_value = if var <= F::zero() {
        F::one() // every observation tied
    } else {
        let z = ((u - mean).abs() - real(0.5)).max(F::zero()) / var.sqrt();
        two_sided(z)
    };
    Ok(MannWhitney { u, u1, u2, p_value })
}

/// Pearson chi-square independence statistic over a contingency table of
/// counts (rows × columns), with p from the chi-square upper tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare<F> {
    pub statistic: F,
    pub degrees_of_freedom: usize,
    pub p_value: F,
}

pub fn chi_square_independence<F: Real>(counts: &[Vec<usize>]) -> Result<ChiSquare<F>> {
    // Levels absent from the data carry no information: drop empty rows/columns.
    let columns = counts.first().map(Vec::len).unwrap_or(0);
    let row_totals: Vec<usize> = counts.iter().map(|r| r.iter().sum()).collect();
    let col_totals: Vec<usize> =
        (0..columns).map(|c| counts.iter().map(|r| r[c]).sum()).collect();
    let live_rows: Vec<usize> =
        (0..counts.len()).filter(|&r| row_totals[r] > 0).collect();
    let live_cols: Vec<usize> = (0..columns).filter(|&c| col_totals[c] > 0).collect();
    if live_rows.len() < 2 {
        return Err(Error::TooFewLevels {
            column: "rows".into(),
            needed: 2,
            found: live_rows.len(),
        });
    }
    if live_cols.len() < 2 {
        return Err(Error::TooFewLevels {
            column: "columns".into(),
            needed: 2,
            found: live_cols.len(),
        });
    }

    let total: F = from_count(row_totals.iter().sum());
    let mut statistic = F::zero();
    for &r in &live_rows {
        for &c in &live_cols {
            let expected = from_count::<F>(row_totals[r]) * from_count::<F>(col_totals[c]) / total;
            let observed: F = from_count(counts[r][c]);
            let d = observed - expected;
            statistic = statistic + d * d / expected;
        }
    }
    let degrees_of_freedom = (live_rows.len() - 1) * (live_cols.len() - 1);
    let p_value = chi_square_sf(statistic, degrees_of_freedom);
    Ok(ChiSquare { statistic, degrees_of_freedom, p_value })
}

fn two_sided<F: Real>(z: F) -> F {
    let p = real::<F>(2.0) * (F::one() - std_normal_cdf(z));
    p.max(F::zero()).min(F::one())
}
