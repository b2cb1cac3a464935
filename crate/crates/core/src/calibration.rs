//! Volatility and funding-carry estimation from hourly mark prices and
//! funding prints.

use crate::error::{invalid, Error, Result};
use crate::model::{HOURS_PER_YEAR, SECONDS_PER_DAY, SECONDS_PER_HOUR};
use crate::stats::{mean, quantile_sorted, sample_std, sorted_copy};

/// Hourly mark prices keyed by Unix seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    points: Vec<(i64, f64)>,
}

impl PriceSeries {
    pub fn new(points: Vec<(i64, f64)>) -> Result<Self> {
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::Schema(format!(
                    "price timestamps must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        if let Some(&(t, p)) = points.iter().find(|(_, p)| !(*p > 0.0) || !p.is_finite()) {
            return Err(Error::Schema(format!("nonpositive price {p} at {t}")));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(i64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Observations in the trailing window ending at the last timestamp.
    pub fn window(&self, lookback_days: u32) -> &[(i64, f64)] {
        trailing(&self.points, lookback_days)
    }
}

/// Funding prints as signed fractions per funding interval.
#[derive(Debug, Clone, PartialEq)]
pub struct FundingSeries {
    points: Vec<(i64, f64)>,
}

impl FundingSeries {
    pub fn new(points: Vec<(i64, f64)>) -> Result<Self> {
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::Schema(format!(
                    "funding timestamps must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        if let Some(&(t, r)) = points.iter().find(|(_, r)| !r.is_finite()) {
            return Err(Error::Schema(format!("non-finite funding rate {r} at {t}")));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(i64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn window(&self, lookback_days: u32) -> &[(i64, f64)] {
        trailing(&self.points, lookback_days)
    }
}

fn trailing(points: &[(i64, f64)], lookback_days: u32) -> &[(i64, f64)] {
    let Some(&(last, _)) = points.last() else {
        return points;
    };
    let start = last - i64::from(lookback_days) * SECONDS_PER_DAY;
    let first = points.partition_point(|&(t, _)| t <= start);
    &points[first..]
}

/// Log returns normalized to a one-hour step. Gaps are bridged by dividing
/// each return by the square root of its elapsed hours.
pub fn hourly_log_returns(series: &PriceSeries, lookback_days: u32) -> Vec<f64> {
    series
        .window(lookback_days)
        .windows(2)
        .map(|w| {
            let dt_hours = (w[1].0 - w[0].0) as f64 / SECONDS_PER_HOUR as f64;
            (w[1].1 / w[0].1).ln() / dt_hours.sqrt()
        })
        .collect()
}

/// Annualized realized volatility from hourly log returns, scaled by `stress`.
pub fn realized_vol(series: &PriceSeries, lookback_days: u32, stress: f64) -> Result<f64> {
    if !(stress > 0.0) {
        return Err(invalid(format!("stress must be positive, got {stress}")));
    }
    let returns = hourly_log_returns(series, lookback_days);
    let sd = sample_std(&returns).ok_or_else(|| {
        Error::InsufficientData(format!(
            "need at least two returns in a {lookback_days}-day window, found {}",
            returns.len()
        ))
    })?;
    Ok(sd * HOURS_PER_YEAR.sqrt() * stress)
}

/// Trailing-window sums of funding prints.
///
/// A print at `t` is taken to cover the interval ending at `t`, so a window
/// `(end - horizon, end]` is complete once it starts no earlier than one
/// print spacing before the first print.
pub fn rolling_cum_funding(series: &FundingSeries, horizon_hours: u32) -> Result<Vec<(i64, f64)>> {
    rolling_sums(series.points(), horizon_hours)
}

fn rolling_sums(points: &[(i64, f64)], horizon_hours: u32) -> Result<Vec<(i64, f64)>> {
    if horizon_hours == 0 {
        return Err(invalid("horizon must be at least one hour"));
    }
    if points.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least two funding prints, found {}",
            points.len()
        )));
    }
    let spacing = points
        .windows(2)
        .map(|w| w[1].0 - w[0].0)
        .min()
        .unwrap_or(SECONDS_PER_HOUR);
    let horizon = i64::from(horizon_hours) * SECONDS_PER_HOUR;
    let first_ts = points[0].0;

    let mut out = Vec::new();
    let mut lo = 0usize;
    for (hi, &(t, _)) in points.iter().enumerate() {
        while points[lo].0 <= t - horizon {
            lo += 1;
        }
        if t - horizon >= first_ts - spacing {
            // summed afresh per window so long series do not accumulate drift
            let sum: f64 = points[lo..=hi].iter().map(|p| p.1).sum();
            out.push((t, sum));
        }
    }
    if out.is_empty() {
        return Err(Error::InsufficientData(format!(
            "funding data does not cover a {horizon_hours}-hour window"
        )));
    }
    Ok(out)
}

/// Scale from a horizon-cumulative fraction to a simple annual rate.
pub fn annualization_factor(horizon_hours: u32) -> f64 {
    HOURS_PER_YEAR / f64::from(horizon_hours)
}

/// Rolling horizon-cumulative funding, annualized by simple scaling.
pub fn rolling_cum_funding_annualized(
    series: &FundingSeries,
    horizon_hours: u32,
) -> Result<Vec<(i64, f64)>> {
    let k = annualization_factor(horizon_hours);
    Ok(rolling_cum_funding(series, horizon_hours)?
        .into_iter()
        .map(|(t, v)| (t, v * k))
        .collect())
}

/// Rolling-horizon mean of cumulative funding inside the lookback window.
pub fn kappa_estimate(series: &FundingSeries, lookback_days: u32, horizon_hours: u32) -> Result<f64> {
    if u64::from(lookback_days) * 24 < u64::from(horizon_hours) {
        return Err(invalid(format!(
            "lookback of {lookback_days} days is shorter than the {horizon_hours}-hour horizon"
        )));
    }
    let window = series.window(lookback_days);
    let sums = rolling_sums(window, horizon_hours)?;
    let values: Vec<f64> = sums.iter().map(|s| s.1).collect();
    mean(&values).ok_or(Error::EmptyInput)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundingWindowStats {
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub q05: f64,
    pub q95: f64,
    pub positive_share: f64,
    pub n: usize,
}

/// Distribution of annualized one-day cumulative funding in the lookback.
pub fn window_stats(series: &FundingSeries, lookback_days: u32) -> Result<FundingWindowStats> {
    let window = series.window(lookback_days);
    let k = annualization_factor(24);
    let values: Vec<f64> = rolling_sums(window, 24)?.into_iter().map(|(_, v)| v * k).collect();
    let sorted = sorted_copy(&values);
    Ok(FundingWindowStats {
        mean: mean(&values).ok_or(Error::EmptyInput)?,
        median: quantile_sorted(&sorted, 0.5)?,
        std: sample_std(&values).unwrap_or(0.0),
        q05: quantile_sorted(&sorted, 0.05)?,
        q95: quantile_sorted(&sorted, 0.95)?,
        positive_share: values.iter().filter(|v| **v > 0.0).count() as f64 / values.len() as f64,
        n: values.len(),
    })
}
