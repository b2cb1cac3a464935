//! Hourly historical replay of the band policy with a fixed execution cost.
//!
//! The perpetual is marked at the spot price (unit tether), so the hedge is
//! exactly delta neutral and mark P&L only appears through cost-driven resets.

use crate::calibration::{FundingSeries, PriceSeries};
use crate::dynamic::{policy_step, ActionKind, AlphaBand, ExecCaps, PolicyConfig};
use crate::error::{invalid, Error, Result};
use crate::model::{leverage, DAYS_PER_YEAR, SECONDS_PER_DAY};

/// Identity tolerance on the return decomposition, relative to initial AuM.
pub const ACCOUNTING_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestConfig {
    pub ticker: String,
    /// Label of the funding stream, e.g. the venue it came from.
    pub funding_source: String,
    /// Band whose `target` is the reset share.
    pub band: AlphaBand,
    pub policy: PolicyConfig,
    /// Fixed execution cost per unit notional, in basis points.
    pub exec_cost_bps: f64,
    pub initial_aum: f64,
    pub prices: PriceSeries,
    pub funding: FundingSeries,
}

impl BacktestConfig {
    fn validate(&self) -> Result<()> {
        self.band.validate()?;
        self.policy.validate()?;
        if !(self.exec_cost_bps >= 0.0) {
            return Err(invalid(format!(
                "execution cost must be nonnegative, got {} bps",
                self.exec_cost_bps
            )));
        }
        if !(self.initial_aum > 0.0) {
            return Err(invalid("initial AuM must be positive"));
        }
        if self.prices.len() < 2 {
            return Err(Error::InsufficientData("backtest needs at least two prices".into()));
        }
        let p = self.prices.points();
        let (t0, t1) = (p[0].0, p[p.len() - 1].0);
        let f = self.funding.points();
        let covered = !f.is_empty() && f[0].0 <= t0 + SECONDS_PER_DAY && f[f.len() - 1].0 >= t1 - SECONDS_PER_DAY;
        if !covered {
            return Err(Error::Misaligned(format!(
                "funding series does not cover the price span [{t0}, {t1}]"
            )));
        }
        Ok(())
    }

    fn same_control(&self, other: &BacktestConfig) -> bool {
        self.band == other.band
            && self.policy == other.policy
            && self.exec_cost_bps == other.exec_cost_bps
            && self.initial_aum == other.initial_aum
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventKind {
    Rebalance(ActionKind),
    /// Lower edge breached with no executable size.
    Emergency,
    /// NAV reached zero; the run stops here.
    Ruin,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub timestamp: i64,
    pub kind: EventKind,
    pub alpha_before: f64,
    pub alpha_after: f64,
    pub notional: f64,
    pub cost: f64,
}

/// Headline metrics. Returns and drawdown are fractions; the two `_pct`
/// fields are percentages of initial AuM.
#[derive(Debug, Clone, PartialEq)]
pub struct BacktestReport {
    pub ticker: String,
    pub funding_source: String,
    pub accumulated_return: f64,
    pub apy: f64,
    pub funding_apy: f64,
    pub max_drawdown: f64,
    pub avg_leverage: f64,
    pub rebalance_count: usize,
    pub turnover_notional: f64,
    pub turnover_pct_initial_aum: f64,
    pub avg_rebalance_pct_initial_aum: f64,
    pub avg_alpha: f64,
    /// Funding cashflows over initial AuM.
    pub funding_return: f64,
    /// Execution costs over initial AuM, nonpositive.
    pub cost_return: f64,
    /// Mark-to-market P&L of both legs over initial AuM.
    pub mark_return: f64,
    pub span_days: f64,
    pub ruined: bool,
}

impl BacktestReport {
    /// Gap between the accumulated return and the sum of its components.
    pub fn accounting_residual(&self) -> f64 {
        self.accumulated_return - (self.funding_return + self.cost_return + self.mark_return)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestRun {
    pub report: BacktestReport,
    pub nav: Vec<(i64, f64)>,
    pub events: Vec<Event>,
}

struct Book {
    spot_units: f64,
    hedge: f64,
    margin: f64,
}

impl Book {
    fn open(equity: f64, alpha: f64, price: f64) -> Self {
        let spot_units = (1.0 - alpha) * equity / price;
        Self {
            spot_units,
            hedge: -spot_units,
            margin: alpha * equity,
        }
    }

    fn equity(&self, price: f64) -> f64 {
        self.spot_units * price + self.margin
    }
}

pub fn run_backtest(cfg: &BacktestConfig) -> Result<BacktestRun> {
    cfg.validate()?;
    let prices = cfg.prices.points();
    let prints = cfg.funding.points();
    let target = cfg.band.target;
    let cost_rate = cfg.exec_cost_bps * 1e-4;
    let v0 = cfg.initial_aum;

    let (t0, p0) = prices[0];
    let mut book = Book::open(v0, target, p0);
    let mut funding_total = 0.0;
    let mut cost_total = 0.0;
    let mut mark_total = 0.0;
    let mut turnover = 0.0;
    let mut rebalances = 0usize;
    let mut events = Vec::new();
    let mut nav = vec![(t0, v0)];
    let mut alpha_sum = target;
    let mut lev_sum = leverage(target)?;
    let mut samples = 1usize;
    let mut ruined = false;

    // prints at or before the first price predate the position
    let mut next_print = prints.partition_point(|p| p.0 <= t0);
    let mut prev_price = p0;

    for &(ts, price) in &prices[1..] {
        let dp = price - prev_price;
        let mark = book.spot_units * dp + book.hedge * dp;
        book.margin += book.hedge * dp;
        mark_total += mark;

        let mut rate = 0.0;
        while next_print < prints.len() && prints[next_print].0 <= ts {
            rate += prints[next_print].1;
            next_print += 1;
        }
        if rate != 0.0 {
            // the short receives positive funding on its notional
            let cash = rate * (-book.hedge) * price;
            book.margin += cash;
            funding_total += cash;
        }
        prev_price = price;

        let equity = book.equity(price);
        if !(equity > 0.0) {
            ruined = true;
            events.push(ruin_event(ts));
            nav.push((ts, equity));
            break;
        }
        let alpha = book.margin / equity;
        let action = policy_step(alpha, &cfg.band, equity, &cfg.policy, ExecCaps::UNBOUNDED);
        let mut alpha_held = alpha;
        match action.kind {
            ActionKind::BuyBasis | ActionKind::SellBasis => {
                let cost = cost_rate * action.notional;
                let after = equity - cost;
                cost_total += cost;
                turnover += action.notional;
                rebalances += 1;
                events.push(Event {
                    timestamp: ts,
                    kind: EventKind::Rebalance(action.kind),
                    alpha_before: alpha,
                    alpha_after: action.resulting_alpha,
                    notional: action.notional,
                    cost,
                });
                if !(after > 0.0) {
                    ruined = true;
                    events.push(ruin_event(ts));
                    nav.push((ts, after));
                    break;
                }
                book = Book::open(after, action.resulting_alpha, price);
                alpha_held = action.resulting_alpha;
            }
            ActionKind::Emergency => events.push(Event {
                timestamp: ts,
                kind: EventKind::Emergency,
                alpha_before: alpha,
                alpha_after: alpha,
                notional: 0.0,
                cost: 0.0,
            }),
            ActionKind::Hold => {}
        }
        nav.push((ts, book.equity(price)));
        alpha_sum += alpha_held;
        lev_sum += (1.0 - alpha_held) / alpha_held;
        samples += 1;
    }

    let (t_end, v_end) = *nav.last().unwrap();
    let span_days = (t_end - t0) as f64 / SECONDS_PER_DAY as f64;
    let accumulated_return = (v_end - v0) / v0;
    let funding_return = funding_total / v0;
    let navs: Vec<f64> = nav.iter().map(|p| p.1).collect();
    let report = BacktestReport {
        ticker: cfg.ticker.clone(),
        funding_source: cfg.funding_source.clone(),
        accumulated_return,
        apy: annualize(accumulated_return, span_days)?,
        funding_apy: annualize(funding_return, span_days)?,
        max_drawdown: max_drawdown(&navs)?,
        avg_leverage: lev_sum / samples as f64,
        rebalance_count: rebalances,
        turnover_notional: turnover,
        turnover_pct_initial_aum: 100.0 * turnover / v0,
        avg_rebalance_pct_initial_aum: if rebalances == 0 {
            0.0
        } else {
            100.0 * turnover / v0 / rebalances as f64
        },
        avg_alpha: alpha_sum / samples as f64,
        funding_return,
        cost_return: -cost_total / v0,
        mark_return: mark_total / v0,
        span_days,
        ruined,
    };
    Ok(BacktestRun { report, nav, events })
}

fn ruin_event(timestamp: i64) -> Event {
    Event {
        timestamp,
        kind: EventKind::Ruin,
        alpha_before: f64::NAN,
        alpha_after: f64::NAN,
        notional: 0.0,
        cost: 0.0,
    }
}

/// Largest peak-to-trough decline, as a nonpositive fraction of the peak.
pub fn max_drawdown(nav: &[f64]) -> Result<f64> {
    if nav.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut peak = f64::NEG_INFINITY;
    let mut worst = 0.0f64;
    for &v in nav {
        peak = peak.max(v);
        if peak > 0.0 {
            worst = worst.min((v - peak) / peak);
        }
    }
    Ok(worst)
}

/// Simple annualization: `r * 365 / span_days`.
pub fn annualize(accumulated_return: f64, span_days: f64) -> Result<f64> {
    if !(span_days > 0.0) {
        return Err(invalid(format!("span must be positive, got {span_days} days")));
    }
    Ok(accumulated_return * DAYS_PER_YEAR / span_days)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FundingDelta {
    pub ticker: String,
    pub delta_apy: f64,
    pub delta_funding_apy: f64,
    pub delta_avg_leverage: f64,
}

/// Change in headline metrics when moving from environment `a` to `b` under
/// the same control parameters.
pub fn compare_funding_envs(a: &BacktestConfig, b: &BacktestConfig) -> Result<FundingDelta> {
    if !a.same_control(b) {
        return Err(Error::MismatchedControl(format!(
            "control parameters differ between '{}' and '{}'",
            a.funding_source, b.funding_source
        )));
    }
    let (ra, rb) = run_pair(a, b);
    let (ra, rb) = (ra?.report, rb?.report);
    Ok(FundingDelta {
        ticker: a.ticker.clone(),
        delta_apy: rb.apy - ra.apy,
        delta_funding_apy: rb.funding_apy - ra.funding_apy,
        delta_avg_leverage: rb.avg_leverage - ra.avg_leverage,
    })
}

#[cfg(feature = "parallel")]
fn run_pair(a: &BacktestConfig, b: &BacktestConfig) -> (Result<BacktestRun>, Result<BacktestRun>) {
    rayon::join(|| run_backtest(a), || run_backtest(b))
}

#[cfg(not(feature = "parallel"))]
fn run_pair(a: &BacktestConfig, b: &BacktestConfig) -> (Result<BacktestRun>, Result<BacktestRun>) {
    (run_backtest(a), run_backtest(b))
}
