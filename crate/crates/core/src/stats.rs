//! Small descriptive-statistics helpers shared across modules.

use crate::error::{invalid, Error, Result};

pub fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }
}

/// Sample standard deviation with the `n - 1` normalization.
pub fn sample_std(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs)?;
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    Some((ss / (xs.len() - 1) as f64).sqrt())
}

/// Quantile of already sorted data, linear interpolation between closest
/// ranks: position `p * (n - 1)`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("quantile level must lie in [0,1], got {p}")));
    }
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let w = pos - lo as f64;
    Ok(sorted[lo] + w * (sorted[hi] - sorted[lo]))
}

pub fn quantile(xs: &[f64], p: f64) -> Result<f64> {
    let sorted = sorted_copy(xs);
    quantile_sorted(&sorted, p)
}

pub fn median(xs: &[f64]) -> Result<f64> {
    quantile(xs, 0.5)
}

pub fn sorted_copy(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}
