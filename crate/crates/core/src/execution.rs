//! Execution-quality diagnostics over a trade log, and the liquidity
//! capacity implied by routed cost curves.
//!
//! Costs are in basis points with positive meaning adverse.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamic::target_rebalance_size;
use crate::error::{invalid, Error, Result};
use crate::stats::{median, quantile, quantile_sorted, sorted_copy};

/// Default minimum economically meaningful trade, in USD.
pub const DEFAULT_Q_MIN: f64 = 10_000.0;
/// Default quantile for the safe capacity.
pub const DEFAULT_SAFE_QUANTILE: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    BuyBasis,
    SellBasis,
}

impl Side {
    pub fn as_str(&self) -> &'static str {
        match self {
            Side::BuyBasis => "buy_basis",
            Side::SellBasis => "sell_basis",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace(['-', ' '], "_").as_str() {
            "buy_basis" | "buy" => Ok(Side::BuyBasis),
            "sell_basis" | "sell" => Ok(Side::SellBasis),
            other => Err(Error::Schema(format!("unknown side '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeRecord {
    pub timestamp: i64,
    pub side: Side,
    pub notional: f64,
    pub target_cost_bps: f64,
    pub realized_cost_bps: f64,
}

impl TradeRecord {
    pub fn new(timestamp: i64, side: Side, notional: f64, target_cost_bps: f64, realized_cost_bps: f64) -> Result<Self> {
        if !(notional > 0.0 && notional.is_finite()) {
            return Err(Error::Schema(format!("notional must be positive, got {notional}")));
        }
        if !target_cost_bps.is_finite() || !realized_cost_bps.is_finite() {
            return Err(Error::Schema("costs must be finite".into()));
        }
        Ok(Self {
            timestamp,
            side,
            notional,
            target_cost_bps,
            realized_cost_bps,
        })
    }

    /// Realized cost within the target plus buffer; ties win.
    pub fn wins(&self, buffer_bps: f64) -> bool {
        self.realized_cost_bps <= self.target_cost_bps + buffer_bps
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WinRates {
    pub wr: f64,
    /// Notional-weighted success fraction.
    pub wr_weighted: f64,
}

pub fn win_rate(trades: &[TradeRecord], buffer_bps: f64) -> Result<WinRates> {
    if trades.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(buffer_bps >= 0.0) {
        return Err(invalid(format!("buffer must be nonnegative, got {buffer_bps}")));
    }
    let (mut wins, mut won, mut total) = (0usize, 0.0, 0.0);
    for t in trades {
        total += t.notional;
        if t.wins(buffer_bps) {
            wins += 1;
            won += t.notional;
        }
    }
    Ok(WinRates {
        wr: wins as f64 / trades.len() as f64,
        wr_weighted: won / total,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    All,
    Side(Side),
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::All => f.write_str("all"),
            Scope::Side(s) => s.fmt(f),
        }
    }
}

/// One row of a side summary. Statistics are absent when the scope is empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryRow {
    pub scope: Scope,
    pub trades: usize,
    pub median_cost_bps: Option<f64>,
    pub win_rate: Option<f64>,
    pub weighted_win_rate: Option<f64>,
}

/// Rows for all trades, then each side, with win rates at zero buffer.
pub fn side_summary(trades: &[TradeRecord]) -> Vec<SummaryRow> {
    [Scope::All, Scope::Side(Side::BuyBasis), Scope::Side(Side::SellBasis)]
        .into_iter()
        .map(|scope| {
            let subset: Vec<TradeRecord> = trades
                .iter()
                .copied()
                .filter(|t| match scope {
                    Scope::All => true,
                    Scope::Side(s) => t.side == s,
                })
                .collect();
            let costs: Vec<f64> = subset.iter().map(|t| t.realized_cost_bps).collect();
            let wr = win_rate(&subset, 0.0).ok();
            SummaryRow {
                scope,
                trades: subset.len(),
                median_cost_bps: median(&costs).ok(),
                win_rate: wr.map(|w| w.wr),
                weighted_win_rate: wr.map(|w| w.wr_weighted),
            }
        })
        .collect()
}

/// Trades with notional at least `q_min`, and their side summary.
pub fn size_filter(trades: &[TradeRecord], q_min: f64) -> Result<(Vec<TradeRecord>, Vec<SummaryRow>)> {
    if !(q_min >= 0.0) {
        return Err(invalid(format!("q_min must be nonnegative, got {q_min}")));
    }
    let kept: Vec<TradeRecord> = trades.iter().copied().filter(|t| t.notional >= q_min).collect();
    let summary = side_summary(&kept);
    Ok((kept, summary))
}

/// Smallest buffer on `b_grid` at which the weighted win rate reaches each
/// level; `None` where no grid point does.
pub fn buffer_curve(trades: &[TradeRecord], levels: &[f64], b_grid: &[f64]) -> Result<Vec<Option<f64>>> {
    if b_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("buffer grid must be strictly ascending"));
    }
    let rates = b_grid
        .iter()
        .map(|&b| win_rate(trades, b).map(|w| w.wr_weighted))
        .collect::<Result<Vec<_>>>()?;
    Ok(levels
        .iter()
        .map(|&level| b_grid.iter().zip(&rates).find(|(_, &r)| r >= level).map(|(&b, _)| b))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MedianCi {
    pub point: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Median realized cost with a 95% percentile-bootstrap interval.
pub fn median_ci(trades: &[TradeRecord], n_resamples: usize, seed: u64) -> Result<MedianCi> {
    let costs: Vec<f64> = trades.iter().map(|t| t.realized_cost_bps).collect();
    median_ci_of(&costs, n_resamples, seed)
}

pub fn median_ci_of(xs: &[f64], n_resamples: usize, seed: u64) -> Result<MedianCi> {
    if xs.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "median interval needs at least 2 observations, got {}",
            xs.len()
        )));
    }
    if n_resamples == 0 {
        return Err(invalid("n_resamples must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = xs.len();
    let mut buf = vec![0.0; n];
    let mut medians = Vec::with_capacity(n_resamples);
    for _ in 0..n_resamples {
        for slot in buf.iter_mut() {
            *slot = xs[rng.random_range(0..n)];
        }
        buf.sort_by(|a, b| a.total_cmp(b));
        medians.push(quantile_sorted(&buf, 0.5)?);
    }
    medians.sort_by(|a, b| a.total_cmp(b));
    Ok(MedianCi {
        point: median(xs)?,
        lo: quantile_sorted(&medians, 0.025)?,
        hi: quantile_sorted(&medians, 0.975)?,
    })
}

/// One routed quote snapshot point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostSample {
    pub timestamp: i64,
    pub side: Side,
    pub notional: f64,
    pub cost_bps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostCurve {
    pub side: Side,
    /// `(notional, cost_bps)` with strictly increasing notionals.
    pub samples: Vec<(f64, f64)>,
    /// Length of the history the curve was aggregated over, in seconds.
    pub window_secs: i64,
}

impl CostCurve {
    pub fn new(side: Side, samples: Vec<(f64, f64)>, window_secs: i64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "a cost curve needs at least 2 notionals, got {}",
                samples.len()
            )));
        }
        if samples.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::Schema("cost-curve notionals must be strictly increasing".into()));
        }
        if samples.iter().any(|s| !(s.0 > 0.0) || !s.1.is_finite()) {
            return Err(Error::Schema("cost-curve notionals must be positive and costs finite".into()));
        }
        Ok(Self {
            side,
            samples,
            window_secs,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Estimator {
    Median,
    Quantile(f64),
}

/// Aggregates the snapshots of one side over the trailing `window_secs`
/// (ending at the latest snapshot) pointwise at each sampled notional.
pub fn operational_cost(samples: &[CostSample], side: Side, window_secs: i64, estimator: Estimator) -> Result<CostCurve> {
    let p = match estimator {
        Estimator::Median => 0.5,
        Estimator::Quantile(p) => p,
    };
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("quantile level must lie in [0,1], got {p}")));
    }
    let own: Vec<&CostSample> = samples.iter().filter(|s| s.side == side).collect();
    let last = own.iter().map(|s| s.timestamp).max().ok_or(Error::EmptyInput)?;
    let mut in_window: Vec<(f64, f64)> = own
        .iter()
        .filter(|s| s.timestamp > last - window_secs)
        .map(|s| (s.notional, s.cost_bps))
        .collect();
    in_window.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut curve = Vec::new();
    let mut i = 0;
    while i < in_window.len() {
        let q = in_window[i].0;
        let mut j = i;
        while j < in_window.len() && in_window[j].0 == q {
            j += 1;
        }
        let costs: Vec<f64> = in_window[i..j].iter().map(|s| s.1).collect();
        curve.push((q, quantile(&costs, p)?));
        i = j;
    }
    CostCurve::new(side, curve, window_secs)
}

/// Nondecreasing least-squares fit by pool-adjacent-violators.
pub fn isotonic(values: &[f64]) -> Vec<f64> {
    // blocks of (mean, count)
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(values.len());
    for &v in values {
        blocks.push((v, 1));
        while blocks.len() > 1 {
            let (m2, n2) = blocks[blocks.len() - 1];
            let (m1, n1) = blocks[blocks.len() - 2];
            if m1 <= m2 {
                break;
            }
            blocks.truncate(blocks.len() - 2);
            let n = n1 + n2;
            blocks.push(((m1 * n1 as f64 + m2 * n2 as f64) / n as f64, n));
        }
    }
    blocks.into_iter().flat_map(|(m, n)| std::iter::repeat_n(m, n)).collect()
}

/// Largest notional whose monotonized cost stays within `budget_bps`.
/// Saturates at the largest sampled notional; `None` when even the smallest
/// sampled notional is over budget.
pub fn max_executable_size(curve: &CostCurve, budget_bps: f64) -> Option<f64> {
    let qs: Vec<f64> = curve.samples.iter().map(|s| s.0).collect();
    let cs = isotonic(&curve.samples.iter().map(|s| s.1).collect::<Vec<_>>());
    if budget_bps < cs[0] {
        return None;
    }
    let Some(i) = cs.iter().position(|&c| c > budget_bps) else {
        return Some(qs[qs.len() - 1]);
    };
    let (q0, q1, c0, c1) = (qs[i - 1], qs[i], cs[i - 1], cs[i]);
    Some(q0 + (budget_bps - c0) / (c1 - c0) * (q1 - q0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityInputs {
    pub alpha_t: f64,
    pub target: f64,
    pub budget_buy_bps: f64,
    pub budget_sell_bps: f64,
    pub q_min_buy: f64,
    pub q_min_sell: f64,
    pub equity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Capacity {
    pub buy: f64,
    pub sell: f64,
    /// Binding capacity, the smaller side.
    pub total: f64,
    /// No rebalance is needed, so equity is not limited by liquidity.
    pub unbounded: bool,
}

/// Largest equity whose required rebalance fits the executable sizes.
pub fn capacity(inputs: &CapacityInputs, q_buy_max: f64, q_sell_max: f64) -> Capacity {
    let phi = target_rebalance_size(inputs.alpha_t, inputs.target, 1.0);
    if phi == 0.0 {
        return Capacity {
            buy: f64::INFINITY,
            sell: f64::INFINITY,
            total: f64::INFINITY,
            unbounded: true,
        };
    }
    let buy = q_buy_max.max(0.0) / phi;
    let sell = q_sell_max.max(0.0) / phi;
    Capacity {
        buy,
        sell,
        total: buy.min(sell),
        unbounded: false,
    }
}

/// An intervention of size `q_star` can be executed only inside
/// `[q_min, q_max]`; a missing `q_max` means nothing is executable.
pub fn intervention_feasible(q_star: f64, q_min: f64, q_max: Option<f64>) -> bool {
    match q_max {
        Some(q_max) => q_star >= q_min && q_star <= q_max,
        None => false,
    }
}

/// Lower quantile of a capacity history.
pub fn safe_capacity(series: &[f64], p: f64) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid(format!("quantile level must lie in (0,1), got {p}")));
    }
    quantile_sorted(&sorted_copy(series), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trade(side: Side, notional: f64, target: f64, realized: f64) -> TradeRecord {
        TradeRecord::new(0, side, notional, target, realized).unwrap()
    }

    #[test]
    fn side_parsing() {
        assert_eq!("buy_basis".parse::<Side>().unwrap(), Side::BuyBasis);
        assert_eq!("Sell Basis".parse::<Side>().unwrap(), Side::SellBasis);
        assert!("hold".parse::<Side>().is_err());
        assert!(TradeRecord::new(0, Side::BuyBasis, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn win_rate_examples() {
        let all_win = [trade(Side::BuyBasis, 5.0, 10.0, 3.0), trade(Side::SellBasis, 2.0, 10.0, 10.0)];
        let w = win_rate(&all_win, 0.0).unwrap();
        assert_eq!((w.wr, w.wr_weighted), (1.0, 1.0));

        let mixed = [trade(Side::BuyBasis, 3.0, 10.0, 9.0), trade(Side::BuyBasis, 1.0, 10.0, 12.0)];
        let w = win_rate(&mixed, 0.0).unwrap();
        assert_eq!((w.wr, w.wr_weighted), (0.5, 0.75));
        let w = win_rate(&mixed, f64::INFINITY).unwrap();
        assert_eq!((w.wr, w.wr_weighted), (1.0, 1.0));
        assert!(win_rate(&[], 0.0).is_err());
        assert!(win_rate(&mixed, -1.0).is_err());
    }

    #[test]
    fn filter_examples() {
        let log = [
            trade(Side::BuyBasis, 500.0, 10.0, 40.0),
            trade(Side::BuyBasis, 20_000.0, 10.0, 8.0),
            trade(Side::SellBasis, 50_000.0, 30.0, 31.0),
        ];
        let (all, _) = size_filter(&log, 0.0).unwrap();
        assert_eq!(all, log.to_vec());
        let (kept, rows) = size_filter(&log, DEFAULT_Q_MIN).unwrap();
        assert_eq!(kept.len(), 2);
        assert_eq!(rows[0].scope, Scope::All);
        assert_eq!(rows[1].trades, 1);
        assert_eq!(rows[1].median_cost_bps, Some(8.0));
        assert_eq!(rows[2].win_rate, Some(0.0));
        let (none, rows) = size_filter(&log, 1e9).unwrap();
        assert!(none.is_empty());
        assert!(rows.iter().all(|r| r.trades == 0 && r.median_cost_bps.is_none() && r.win_rate.is_none()));
    }

    #[test]
    fn buffer_examples() {
        let winners = [trade(Side::BuyBasis, 1.0, 5.0, 4.0), trade(Side::SellBasis, 2.0, 5.0, 5.0)];
        let grid: Vec<f64> = (0..=20).map(f64::from).collect();
        assert_eq!(buffer_curve(&winners, &[0.9, 0.95], &grid).unwrap(), vec![Some(0.0), Some(0.0)]);

        // 90% of capital within 6 bps, another 5% needs 10 bps, 5% never
        let log = [
            trade(Side::BuyBasis, 90.0, 0.0, 6.0),
            trade(Side::BuyBasis, 5.0, 0.0, 10.0),
            trade(Side::SellBasis, 5.0, 0.0, 50.0),
        ];
        let got = buffer_curve(&log, &[0.9, 0.95, 0.98, 1.01], &grid).unwrap();
        assert_eq!(got, vec![Some(6.0), Some(10.0), None, None]);
        assert!(buffer_curve(&log, &[0.9], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn median_ci_examples() {
        let flat: Vec<_> = (0..50).map(|_| trade(Side::BuyBasis, 1.0, 0.0, 18.2)).collect();
        let ci = median_ci(&flat, 500, 1).unwrap();
        assert_eq!((ci.point, ci.lo, ci.hi), (18.2, 18.2, 18.2));
        assert!(median_ci(&flat[..1], 10, 1).is_err());
        assert_eq!(median_ci(&flat, 200, 7).unwrap(), median_ci(&flat, 200, 7).unwrap());
    }

    #[test]
    fn median_ci_coverage() {
        use rand_distr::{Distribution, Normal};
        let dist = Normal::new(20.0, 6.0).unwrap();
        let mut covered = 0;
        for trial in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + trial);
            let xs: Vec<f64> = (0..200).map(|_| dist.sample(&mut rng)).collect();
            let ci = median_ci_of(&xs, 400, trial).unwrap();
            if ci.lo <= 20.0 && 20.0 <= ci.hi {
                covered += 1;
            }
        }
        assert!(covered >= 90, "coverage {covered}/100");
    }

    fn sample(ts: i64, q: f64, c: f64) -> CostSample {
        CostSample {
            timestamp: ts,
            side: Side::SellBasis,
            notional: q,
            cost_bps: c,
        }
    }

    #[test]
    fn operational_cost_examples() {
        let one = [sample(0, 1e4, 5.0), sample(0, 5e4, 9.0)];
        let c = operational_cost(&one, Side::SellBasis, 3600, Estimator::Median).unwrap();
        assert_eq!(c.samples, vec![(1e4, 5.0), (5e4, 9.0)]);

        let many = [
            sample(0, 1e4, 10.0),
            sample(60, 1e4, 30.0),
            sample(120, 1e4, 20.0),
            sample(0, 5e4, 40.0),
            sample(60, 5e4, 10.0),
            sample(120, 5e4, 25.0),
            sample(130, 5e4, 35.0),
        ];
        let c = operational_cost(&many, Side::SellBasis, 3600, Estimator::Median).unwrap();
        assert_eq!(c.samples[0], (1e4, 20.0));
        let c = operational_cost(&many, Side::SellBasis, 3600, Estimator::Quantile(0.75)).unwrap();
        // sorted {10, 25, 35, 40}: position 2.25
        assert!((c.samples[1].1 - 36.25).abs() < 1e-12);
        // trailing window drops the oldest snapshot
        let c = operational_cost(&many, Side::SellBasis, 100, Estimator::Median).unwrap();
        assert_eq!(c.samples[0], (1e4, 25.0));
        assert!(matches!(
            operational_cost(&many, Side::BuyBasis, 100, Estimator::Median),
            Err(Error::EmptyInput)
        ));
    }

    #[test]
    fn isotonic_pools_violators() {
        assert_eq!(isotonic(&[1.0, 3.0, 2.0, 4.0]), vec![1.0, 2.5, 2.5, 4.0]);
        assert_eq!(isotonic(&[5.0, 4.0, 3.0]), vec![4.0, 4.0, 4.0]);
        assert_eq!(isotonic(&[1.0, 2.0]), vec![1.0, 2.0]);
    }

    #[test]
    fn inversion_examples() {
        let a = 2e-4;
        let curve = CostCurve::new(Side::BuyBasis, (1..=10).map(|k| (k as f64 * 1e4, a * k as f64 * 1e4)).collect(), 0).unwrap();
        let q = max_executable_size(&curve, 11.0).unwrap();
        assert!((q - 11.0 / a).abs() < 1e-6);
        assert_eq!(max_executable_size(&curve, 1e6), Some(1e5));
        assert_eq!(max_executable_size(&curve, 1.0), None);
        assert!(CostCurve::new(Side::BuyBasis, vec![(1.0, 1.0)], 0).is_err());
        assert!(CostCurve::new(Side::BuyBasis, vec![(2.0, 1.0), (1.0, 2.0)], 0).is_err());
    }

    #[test]
    fn capacity_examples() {
        let inputs = CapacityInputs {
            alpha_t: 0.3,
            target: 0.2,
            budget_buy_bps: 20.0,
            budget_sell_bps: 40.0,
            q_min_buy: DEFAULT_Q_MIN,
            q_min_sell: DEFAULT_Q_MIN,
            equity: 1e6,
        };
        let c = capacity(&inputs, 1e5, 5e4);
        assert!((c.buy - 1e6).abs() < 1e-6 && (c.sell - 5e5).abs() < 1e-6 && c.total == c.sell);
        assert!(!c.unbounded);
        let sym = capacity(&inputs, 7e4, 7e4);
        assert_eq!(sym.total, sym.buy);
        let flat = capacity(&CapacityInputs { alpha_t: 0.2, ..inputs }, 1e5, 5e4);
        assert!(flat.unbounded && flat.total.is_infinite());
    }

    #[test]
    fn feasibility_grid() {
        let q_min = 10_000.0;
        for q_star in [0.0, 5_000.0, 9_999.0, 10_000.0, 50_000.0, 100_000.0, 100_001.0, 1e7] {
            for q_max in [None, Some(0.0), Some(9_000.0), Some(10_000.0), Some(100_000.0), Some(1e9)] {
                let want = match q_max {
                    None => false,
                    Some(m) => q_star >= q_min && q_star <= m,
                };
                assert_eq!(intervention_feasible(q_star, q_min, q_max), want, "{q_star} {q_max:?}");
            }
        }
    }

    #[test]
    fn safe_capacity_examples() {
        assert_eq!(safe_capacity(&[7.0; 5], 0.25).unwrap(), 7.0);
        assert_eq!(safe_capacity(&[7.0; 5], 0.9).unwrap(), 7.0);
        // positions 0.75 between 1 and 2
        assert!((safe_capacity(&[4.0, 2.0, 3.0, 1.0], 0.25).unwrap() - 1.75).abs() < 1e-15);
        assert!(safe_capacity(&[], 0.25).is_err());
        assert!(safe_capacity(&[1.0], 1.0).is_err());
    }

    fn arb_trades() -> impl Strategy<Value = Vec<TradeRecord>> {
        proptest::collection::vec(
            (any::<bool>(), 1.0f64..1e6, -20.0f64..60.0, -40.0f64..120.0),
            1..60,
        )
        .prop_map(|v| {
            v.into_iter()
                .map(|(buy, q, k, c)| trade(if buy { Side::BuyBasis } else { Side::SellBasis }, q, k, c))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn win_rates_monotone_in_buffer(trades in arb_trades(), b1 in 0.0f64..50.0, b2 in 0.0f64..50.0) {
            let (lo, hi) = if b1 < b2 { (b1, b2) } else { (b2, b1) };
            let (a, b) = (win_rate(&trades, lo).unwrap(), win_rate(&trades, hi).unwrap());
            prop_assert!(a.wr <= b.wr && a.wr_weighted <= b.wr_weighted);
        }

        #[test]
        fn equal_notionals_make_rates_agree(trades in arb_trades(), b in 0.0f64..30.0) {
            let flat: Vec<_> = trades.iter().map(|t| TradeRecord { notional: 1.0, ..*t }).collect();
            let w = win_rate(&flat, b).unwrap();
            prop_assert!((w.wr - w.wr_weighted).abs() < 1e-12);
        }

        #[test]
        fn filter_shrinks(trades in arb_trades(), q in 0.0f64..1e6) {
            let (kept, _) = size_filter(&trades, q).unwrap();
            prop_assert!(kept.len() <= trades.len());
        }

        #[test]
        fn filtering_costly_small_trades_lowers_median(
            small in proptest::collection::vec(30.0f64..80.0, 1..30),
            large in proptest::collection::vec(0.0f64..29.0, 1..30),
        ) {
            let mut log: Vec<_> = small.iter().map(|&c| trade(Side::BuyBasis, 1_000.0, 0.0, c)).collect();
            log.extend(large.iter().map(|&c| trade(Side::SellBasis, 50_000.0, 0.0, c)));
            let raw = side_summary(&log)[0].median_cost_bps.unwrap();
            let (_, rows) = size_filter(&log, DEFAULT_Q_MIN).unwrap();
            prop_assert!(rows[0].median_cost_bps.unwrap() <= raw);
        }

        #[test]
        fn executable_size_monotone_in_budget(
            costs in proptest::collection::vec(0.0f64..80.0, 2..20),
            k1 in -5.0f64..100.0, k2 in -5.0f64..100.0,
        ) {
            let curve = CostCurve::new(
                Side::SellBasis,
                costs.iter().enumerate().map(|(i, &c)| ((i + 1) as f64 * 1e4, c)).collect(),
                0,
            ).unwrap();
            let (lo, hi) = if k1 < k2 { (k1, k2) } else { (k2, k1) };
            let a = max_executable_size(&curve, lo).unwrap_or(0.0);
            let b = max_executable_size(&curve, hi).unwrap_or(0.0);
            prop_assert!(a <= b + 1e-9);
        }

        #[test]
        fn capacity_is_side_minimum(
            a in 0.01f64..0.9, t in 0.01f64..0.9, qb in 0.0f64..1e7, qs in 0.0f64..1e7,
        ) {
            let inputs = CapacityInputs {
                alpha_t: a, target: t, budget_buy_bps: 10.0, budget_sell_bps: 10.0,
                q_min_buy: 0.0, q_min_sell: 0.0, equity: 1.0,
            };
            let c = capacity(&inputs, qb, qs);
            prop_assert_eq!(c.total, c.buy.min(c.sell));
        }

        #[test]
        fn safe_capacity_monotone_in_level(
            xs in proptest::collection::vec(0.0f64..1e8, 1..50), p1 in 0.01f64..0.99, p2 in 0.01f64..0.99,
        ) {
            let (lo, hi) = if p1 < p2 { (p1, p2) } else { (p2, p1) };
            prop_assert!(safe_capacity(&xs, lo).unwrap() <= safe_capacity(&xs, hi).unwrap());
        }
    }
}
