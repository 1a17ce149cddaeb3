//! Divide-and-conquer for time series: moving-average filtering, linear
//! detrending, and classical additive trend/seasonal/residual decomposition.
//!
//! A complicated nonlinear pattern becomes several simple sub-patterns that
//! plain models can fit and engineers can read.

use crate::error::{Error, Result};
use crate::scalar::{from_count, real, Real};
use crate::stats::{least_squares_fit, LinearFit};
use crate::EpochSeconds;

/// A timestamped value sequence; `None` marks a missing observation.
#[derive(Debug, Clone, PartialEq)]
pub struct Series<F> {
    timestamps: Vec<EpochSeconds>,
    values: Vec<Option<F>>,
}

impl<F: Real> Series<F> {
    pub fn new(timestamps: Vec<EpochSeconds>, values: Vec<Option<F>>) -> Result<Self> {
        if timestamps.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "series has {} timestamps but {} values",
                timestamps.len(),
                values.len()
            )));
        }
        if timestamps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "series timestamps must be strictly increasing".into(),
            ));
        }
        Ok(Series { timestamps, values })
    }

    /// Evenly spaced series starting at 0, for index-based data.
    pub fn from_values(values: Vec<Option<F>>) -> Self {
        let timestamps = (0..values.len() as EpochSeconds).collect();
        Series { timestamps, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn timestamps(&self) -> &[EpochSeconds] {
        &self.timestamps
    }

    pub fn values(&self) -> &[Option<F>] {
        &self.values
    }

    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    fn with_values(&self, values: Vec<Option<F>>) -> Series<F> {
        Series { timestamps: self.timestamps.clone(), values }
    }
}

/// Centered moving average: odd `window` means a plain mean; even periods go
/// through [`decompose_additive`], which widens to period+1 with half-weight
/// ends so the filter stays centered. The first and last (window−1)/2 outputs
/// are missing, as is any output whose window covers a missing input.
pub fn moving_average<F: Real>(series: &Series<F>, window: usize) -> Result<Series<F>> {
    if window % 2 == 0 || window == 0 {
        return Err(Error::InvalidParameter(format!("window must be odd, got {window}")));
    }
    if window > series.len() {
        return Err(Error::InvalidParameter(format!(
            "window {window} exceeds series length {}",
            series.len()
        )));
    }
    let half = (window - 1) / 2;
    let weights = vec![F::one(); window];
    Ok(series.with_values(weighted_centered(series.values(), &weights, half)))
}

/// Weighted centered filter; `half` values on each edge come out missing.
fn weighted_centered<F: Real>(
    values: &[Option<F>],
    weights: &[F],
    half: usize,
) -> Vec<Option<F>> {
    let n = values.len();
    let total: F = weights.iter().copied().sum();
    let mut out = vec![None; n];
    for center in half..n.saturating_sub(half) {
        let window = &values[center - half..=center + half];
        if window.iter().all(Option::is_some) {
            let acc = window
                .iter()
                .zip(weights)
                .map(|(v, &w)| v.unwrap() * w)
                .sum::<F>();
            out[center] = Some(acc / total);
        }
    }
    out
}

/// Least-squares line over (index, value); returns the residual series and
/// the fit. Missing observations stay missing in the residual.
pub fn detrend_linear<F: Real>(series: &Series<F>) -> Result<(Series<F>, LinearFit<F>)> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, v) in series.values().iter().enumerate() {
        if let Some(v) = v {
            xs.push(from_count::<F>(i));
            ys.push(*v);
        }
    }
    if xs.len() < 3 {
        return Err(Error::TooFewObservations { needed: 3, got: xs.len() });
    }
    let fit = least_squares_fit(&[xs], &ys)?;
    let residuals = series
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            v.map(|value| value - (fit.intercept + fit.coefficients[0] * from_count::<F>(i)))
        })
        .collect();
    Ok((series.with_values(residuals), fit))
}

/// Classical additive decomposition aligned to the input series.
#[derive(Debug, Clone)]
pub struct Decomposition<F> {
    pub trend: Series<F>,
    pub seasonal: Series<F>,
    pub residual: Series<F>,
    pub period: usize,
    /// Index interval (start, end-exclusive) where the trend is defined.
    pub valid_range: (usize, usize),
}

/// value = trend + seasonal + residual, with trend the centered moving
/// average of width `period` (period+1 with half-weight ends when even),
/// seasonal the mean-centered per-phase average of the detrended values, and
/// residual the remainder on the valid range.
pub fn decompose_additive<F: Real>(series: &Series<F>, period: usize) -> Result<Decomposition<F>> {
    if period < 2 {
        return Err(Error::InvalidParameter(format!("period must be ≥ 2, got {period}")));
    }
    let n = series.len();
    if n < 2 * period {
        return Err(Error::TooFewObservations { needed: 2 * period, got: n });
    }
    let missing = series.missing_count();
    if missing * 10 > n {
        return Err(Error::InvalidParameter(format!(
            "more than 10% missing values ({missing} of {n})"
        )));
    }

    // trend: centered MA, 2×period style for even periods
    let (weights, half) = if period % 2 == 0 {
        let mut w = vec![F::one(); period + 1];
        w[0] = real(0.5);
        w[period] = real(0.5);
        (w, period / 2)
    } else {
        (vec![F::one(); period], (period - 1) / 2)
    };
    let trend_values = weighted_centered(series.values(), &weights, half);
    let trend = series.with_values(trend_values.clone());

    // per-phase means of (value − trend) where both exist
    let mut phase_sum = vec![F::zero(); period];
    let mut phase_n = vec![0usize; period];
    for i in 0..n {
        if let (Some(v), Some(t)) = (series.values()[i], trend_values[i]) {
            phase_sum[i % period] = phase_sum[i % period] + (v - t);
            phase_n[i % period] += 1;
        }
    }
    let mut phase_mean: Vec<F> = phase_sum
        .iter()
        .zip(&phase_n)
        .map(|(&s, &c)| if c > 0 { s / from_count(c) } else { F::zero() })
        .collect();
    // center so the seasonal component sums to zero over one period
    let grand = phase_mean.iter().copied().sum::<F>() / from_count(period);
    for m in phase_mean.iter_mut() {
        *m = *m - grand;
    }

    let seasonal_values: Vec<Option<F>> =
        (0..n).map(|i| Some(phase_mean[i % period])).collect();
    let seasonal = series.with_values(seasonal_values.clone());

    let residual_values: Vec<Option<F>> = (0..n)
        .map(|i| match (series.values()[i], trend_values[i]) {
            (Some(v), Some(t)) => Some(v - t - phase_mean[i % period]),
            _ => None,
        })
        .collect();
    let residual = series.with_values(residual_values);

    Ok(Decomposition {
        trend,
        seasonal,
        residual,
        period,
        valid_range: (half, n - half),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn series(values: &[f64]) -> Series<f64> {
        Series::from_values(values.iter().map(|&v| Some(v)).collect())
    }

    #[test]
    fn moving_average_of_constants_is_constant() {
        let out = moving_average(&series(&[4.0; 7]), 3).unwrap();
        assert_eq!(out.values()[0], None);
        for v in &out.values()[1..6] {
            assert_relative_eq!(v.unwrap(), 4.0);
        }
        assert_eq!(out.values()[6], None);
    }

    #[test]
    fn moving_average_small_example() {
        let out = moving_average(&series(&[1.0, 2.0, 3.0, 4.0, 5.0]), 3).unwrap();
        let expect = [None, Some(2.0), Some(3.0), Some(4.0), None];
        assert_eq!(out.values(), &expect);
    }

    #[test]
    fn moving_average_window_equal_length_gives_global_mean() {
        let out = moving_average(&series(&[1.0, 2.0, 6.0]), 3).unwrap();
        assert_eq!(out.values()[0], None);
        assert_relative_eq!(out.values()[1].unwrap(), 3.0);
        assert_eq!(out.values()[2], None);
    }

    #[test]
    fn moving_average_rejects_even_or_oversized_window() {
        assert!(moving_average(&series(&[1.0, 2.0, 3.0]), 2).is_err());
        assert!(moving_average(&series(&[1.0, 2.0, 3.0]), 5).is_err());
    }

    #[test]
    fn moving_average_propagates_missing_inside_window() {
        let s = Series::from_values(vec![Some(1.0), Some(2.0), None, Some(4.0), Some(5.0)]);
        let out = moving_average(&s, 3).unwrap();
        assert_eq!(out.values(), &[None, None, None, None, None]);
    }

    #[test]
    fn moving_average_commutes_with_constant_shift() {
        let base = [0.3, 1.7, -0.4, 2.2, 0.9, 1.1, -0.7];
        let shifted: Vec<f64> = base.iter().map(|v| v + 5.0).collect();
        let a = moving_average(&series(&base), 3).unwrap();
        let b = moving_average(&series(&shifted), 3).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            match (x, y) {
                (Some(x), Some(y)) => assert_relative_eq!(x + 5.0, y, epsilon = 1e-12),
                (None, None) => {}
                _ => panic!("mask mismatch"),
            }
        }
    }

    #[test]
    fn detrend_removes_exact_line() {
        let values: Vec<f64> = (0..10).map(|i| 2.5 * i as f64 + 1.0).collect();
        let (residual, fit) = detrend_linear(&series(&values)).unwrap();
        assert_relative_eq!(fit.coefficients[0], 2.5, epsilon = 1e-10);
        for v in residual.values() {
            assert!(v.unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn detrend_constant_series_gives_zero_slope() {
        let (residual, fit) = detrend_linear(&series(&[3.0; 6])).unwrap();
        assert_relative_eq!(fit.coefficients[0], 0.0, epsilon = 1e-12);
        for v in residual.values() {
            assert!(v.unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn detrend_recovers_sinusoid_over_whole_periods() {
        // a sinusoid sampled at midpoint phase over whole periods is exactly
        // orthogonal to the linear trend (a raw-phase sine is not)
        let period = 16usize;
        let n = 2 * period;
        let wave = |i: usize| {
            (2.0 * std::f64::consts::PI * (i as f64 + 0.5) / period as f64).cos()
        };
        let values: Vec<f64> = (0..n).map(|i| 0.7 * i as f64 + 3.0 + wave(i)).collect();
        let (residual, _) = detrend_linear(&series(&values)).unwrap();
        for (i, v) in residual.values().iter().enumerate() {
            assert_relative_eq!(v.unwrap(), wave(i), epsilon = 1e-6);
        }
    }

    #[test]
    fn detrend_needs_three_points() {
        let s = Series::from_values(vec![Some(1.0), Some(2.0), None, None]);
        assert!(matches!(detrend_linear(&s), Err(Error::TooFewObservations { .. })));
    }

    fn check_reconstruction(d: &Decomposition<f64>, original: &Series<f64>) {
        let (start, end) = d.valid_range;
        for i in start..end {
            if let (Some(v), Some(t), Some(s), Some(r)) = (
                original.values()[i],
                d.trend.values()[i],
                d.seasonal.values()[i],
                d.residual.values()[i],
            ) {
                assert!((t + s + r - v).abs() < 1e-9, "reconstruction failed at {i}");
            }
        }
    }

    #[test]
    fn pure_sine_lands_in_seasonal() {
        let period = 12usize;
        let n = 4 * period;
        let values: Vec<f64> = (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * (i % period) as f64 / period as f64).sin())
            .collect();
        let s = series(&values);
        let d = decompose_additive(&s, period).unwrap();
        check_reconstruction(&d, &s);
        let (start, end) = d.valid_range;
        let mut sq = 0.0;
        let mut count = 0;
        for i in start..end {
            assert_relative_eq!(d.seasonal.values()[i].unwrap(), values[i], epsilon = 1e-9);
            sq += d.residual.values()[i].unwrap().powi(2);
            count += 1;
        }
        assert!((sq / count as f64).sqrt() < 1e-6, "residual RMS too large");
    }

    #[test]
    fn linear_series_has_no_seasonal() {
        let values: Vec<f64> = (0..24).map(|i| 1.5 * i as f64 - 3.0).collect();
        let s = series(&values);
        let d = decompose_additive(&s, 6).unwrap();
        check_reconstruction(&d, &s);
        for v in d.seasonal.values().iter().flatten() {
            assert!(v.abs() < 1e-9);
        }
        let (start, end) = d.valid_range;
        for i in start..end {
            assert!(d.residual.values()[i].unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn seasonal_sums_to_zero_over_one_period() {
        let values: Vec<f64> = (0..30)
            .map(|i| 0.3 * i as f64 + [1.0, 4.0, 2.0, -1.0, 0.5][i % 5])
            .collect();
        let d = decompose_additive(&series(&values), 5).unwrap();
        let sum: f64 = (0..5).map(|i| d.seasonal.values()[i].unwrap()).sum();
        assert!(sum.abs() < 1e-9);
    }

    #[test]
    fn even_period_uses_half_weight_ends() {
        // a pure period-4 cycle must vanish under the 2×4 weighted MA
        let period = 4usize;
        let cycle = [2.0, -1.0, -2.0, 1.0];
        let values: Vec<f64> = (0..4 * period).map(|i| 10.0 + cycle[i % period]).collect();
        let d = decompose_additive(&series(&values), period).unwrap();
        let (start, end) = d.valid_range;
        for i in start..end {
            assert_relative_eq!(d.trend.values()[i].unwrap(), 10.0, epsilon = 1e-9);
        }
        check_reconstruction(&d, &series(&values));
    }

    #[test]
    fn seasonal_invariant_under_constant_shift() {
        let values: Vec<f64> =
            (0..36).map(|i| (2.0 * std::f64::consts::PI * (i % 9) as f64 / 9.0).cos()).collect();
        let shifted: Vec<f64> = values.iter().map(|v| v + 100.0).collect();
        let a = decompose_additive(&series(&values), 9).unwrap();
        let b = decompose_additive(&series(&shifted), 9).unwrap();
        for (x, y) in a.seasonal.values().iter().zip(b.seasonal.values()) {
            assert_relative_eq!(x.unwrap(), y.unwrap(), epsilon = 1e-9);
        }
    }

    #[test]
    fn short_series_is_rejected() {
        let values: Vec<f64> = (0..7).map(|i| i as f64).collect();
        assert!(decompose_additive(&series(&values), 4).is_err());
    }

    #[test]
    fn too_many_missing_is_rejected() {
        let mut values: Vec<Option<f64>> = (0..20).map(|i| Some(i as f64)).collect();
        for i in 0..3 {
            values[i * 5] = None;
        }
        let s = Series::from_values(values);
        assert!(decompose_additive(&s, 4).is_err());
    }

    #[test]
    fn strictly_increasing_timestamps_enforced() {
        assert!(Series::new(vec![0, 1, 1], vec![Some(1.0f64), Some(2.0), Some(3.0)]).is_err());
        assert!(Series::new(vec![0, 2, 5], vec![Some(1.0f64), Some(2.0), Some(3.0)]).is_ok());
    }
}
