//! Subcommand implementations. Each returns one table.

use std::path::PathBuf;

use basis_core::backtest::{compare_funding_envs, run_backtest, BacktestConfig, EventKind};
use basis_core::calibration::{hourly_log_returns, kappa_estimate, realized_vol, window_stats, FundingSeries, PriceSeries};
use basis_core::dynamic::{lower_bound, upper_bound, ActionKind, AlphaBand, PolicyConfig};
use basis_core::execution::{
    buffer_curve, capacity, max_executable_size, median_ci, operational_cost, safe_capacity, side_summary, size_filter,
    CapacityInputs, CostSample, Estimator, Scope, Side, TradeRecord,
};
use basis_core::model::{hours_to_years, MarketParams, SECONDS_PER_HOUR};
use basis_core::simulation::{bootstrap_lower_bound, upper_hit_study, BootstrapConfig, BootstrapRow, SimConfig};
use basis_core::static_control::{benchmark_slice, solve_variant1, solve_variant2, Binding, SliceConfig, SliceInput, StaticProblem};
use basis_core::stats::median;

use crate::config::{Market, RunConfig, LOOKBACKS, STRESSES};
use crate::error::{CliError, Result};
use crate::io;
use crate::table::{Cell, Table, Unit};

const BPS: f64 = 1e-4;

/// Explicit input files that take precedence over the config's datasets.
#[derive(Debug, Clone, Default)]
pub struct Inputs {
    pub prices: Option<PathBuf>,
    pub funding: Option<PathBuf>,
    pub funding_alt: Option<PathBuf>,
    pub trades: Option<PathBuf>,
    pub cost_curve: Option<PathBuf>,
}

pub struct Ctx<'a> {
    pub cfg: &'a RunConfig,
    pub inputs: &'a Inputs,
    /// Restricts per-market commands to one `venue:asset`.
    pub market: Option<&'a str>,
}

struct Calibrated {
    prices: PriceSeries,
    funding: FundingSeries,
    sigma_raw: f64,
    sigma: f64,
    kappa_h: f64,
    kappa_decision: f64,
    theta_f: f64,
}

impl Ctx<'_> {
    fn markets(&self) -> Result<Vec<&Market>> {
        let ms: Vec<&Market> = self
            .cfg
            .markets
            .iter()
            .filter(|m| self.market.is_none_or(|want| m.label().eq_ignore_ascii_case(want)))
            .collect();
        if ms.is_empty() {
            return Err(CliError::Usage(format!("no configured market matches {:?}", self.market)));
        }
        Ok(ms)
    }

    fn path(&self, kind: &str, m: Option<&Market>) -> Result<PathBuf> {
        let over = match kind {
            "prices" => &self.inputs.prices,
            "funding" => &self.inputs.funding,
            "funding_alt" => &self.inputs.funding_alt,
            "trades" => &self.inputs.trades,
            _ => &self.inputs.cost_curve,
        };
        if let Some(p) = over {
            return Ok(p.clone());
        }
        let resolved = match m {
            Some(m) => self.cfg.dataset(kind, m),
            None => self
                .cfg
                .datasets
                .get(&format!("{}.{kind}", self.cfg.layer))
                .map(|t| self.cfg.base_dir.join(t)),
        };
        resolved.ok_or_else(|| {
            CliError::Config(format!(
                "no {kind} input: pass --{} or set {}.{kind}",
                kind.replace('_', "-"),
                self.cfg.layer
            ))
        })
    }

    fn calibrate(&self, m: &Market) -> Result<Calibrated> {
        let cfg = self.cfg;
        let prices = io::read_prices(&self.path("prices", Some(m))?)?;
        let funding = io::read_funding(&self.path("funding", Some(m))?)?;
        let sigma_raw = realized_vol(&prices, cfg.lookback_days, 1.0)?;
        let kappa_h = kappa_estimate(&funding, cfg.lookback_days, cfg.horizon_hours())?;
        let kappa_decision = kappa_estimate(&funding, cfg.lookback_days, cfg.decision_horizon_days * 24)?;
        Ok(Calibrated {
            prices,
            funding,
            sigma_raw,
            sigma: sigma_raw * cfg.stress,
            kappa_h,
            kappa_decision,
            theta_f: m.venue.theta_f()?,
        })
    }

    fn target(&self, m: &Market, c: &Calibrated) -> Result<f64> {
        let rows = benchmark_slice(
            &[SliceInput {
                venue: m.venue.clone(),
                asset: m.asset.clone(),
                sigma: c.sigma_raw,
                kappa_h: c.kappa_h,
            }],
            &self.slice_config(),
        )?;
        Ok(rows[0].alpha_star)
    }

    fn slice_config(&self) -> SliceConfig {
        SliceConfig {
            epsilon: self.cfg.epsilon,
            stress: self.cfg.stress,
            h: self.cfg.h_years(),
            mu: self.cfg.mu,
        }
    }

    fn policy(&self, kappa_decision: f64) -> PolicyConfig {
        PolicyConfig {
            h_liq_hours: self.cfg.h_liq_hours,
            eps_liq: self.cfg.eps_liq,
            kappa_h: kappa_decision,
            k_fix: self.cfg.k_fix_bps * BPS,
            q_min: self.cfg.q_min,
            decision_horizon_days: self.cfg.decision_horizon_days,
        }
    }

    fn seed(&self) -> u64 {
        self.cfg.seed
    }
}

fn label_cells(m: &Market) -> Vec<Cell> {
    vec![m.venue.name.clone().into(), m.asset.clone().into()]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CalibrateTable {
    Vol,
    Stats,
}

pub fn calibrate(ctx: &Ctx, which: CalibrateTable) -> Result<Table> {
    match which {
        CalibrateTable::Vol => {
            let mut t = Table::new(&[
                ("venue", Unit::Plain),
                ("asset", Unit::Plain),
                ("lookback_days", Unit::Plain),
                ("sigma", Unit::Plain),
                ("sigma_stressed", Unit::Plain),
                ("kappa_h", Unit::Bps),
                ("kappa_h_apy", Unit::Percent),
                ("kappa_decision", Unit::Bps),
                ("theta_f", Unit::Plain),
            ]);
            for m in ctx.markets()? {
                let c = ctx.calibrate(m)?;
                let mut row = label_cells(m);
                row.extend([
                    Cell::Int(ctx.cfg.lookback_days as i64),
                    c.sigma_raw.into(),
                    c.sigma.into(),
                    c.kappa_h.into(),
                    (c.kappa_h * 365.0 / ctx.cfg.h_days).into(),
                    c.kappa_decision.into(),
                    c.theta_f.into(),
                ]);
                t.push(row);
            }
            Ok(t)
        }
        CalibrateTable::Stats => {
            let mut t = Table::new(&[
                ("venue", Unit::Plain),
                ("asset", Unit::Plain),
                ("lookback_days", Unit::Plain),
                ("mean", Unit::Percent),
                ("median", Unit::Percent),
                ("std", Unit::Percent),
                ("q05", Unit::Percent),
                ("q95", Unit::Percent),
                ("positive_share", Unit::Percent),
                ("windows", Unit::Plain),
            ]);
            for m in ctx.markets()? {
                let funding = io::read_funding(&ctx.path("funding", Some(m))?)?;
                for lb in LOOKBACKS {
                    let s = window_stats(&funding, lb)?;
                    let mut row = label_cells(m);
                    row.extend([
                        Cell::Int(lb as i64),
                        s.mean.into(),
                        s.median.into(),
                        s.std.into(),
                        s.q05.into(),
                        s.q95.into(),
                        s.positive_share.into(),
                        s.n.into(),
                    ]);
                    t.push(row);
                }
            }
            Ok(t)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum StaticTable {
    Slice,
    Grid,
}

pub fn static_cmd(ctx: &Ctx, which: StaticTable) -> Result<Table> {
    let markets = ctx.markets()?;
    let mut cal = Vec::with_capacity(markets.len());
    for m in &markets {
        cal.push(ctx.calibrate(m)?);
    }
    match which {
        StaticTable::Slice => {
            let inputs: Vec<SliceInput> = markets
                .iter()
                .zip(&cal)
                .map(|(m, c)| SliceInput {
                    venue: m.venue.clone(),
                    asset: m.asset.clone(),
                    sigma: c.sigma_raw,
                    kappa_h: c.kappa_h,
                })
                .collect();
            let rows = benchmark_slice(&inputs, &ctx.slice_config())?;
            let mut t = Table::new(&[
                ("venue", Unit::Plain),
                ("asset", Unit::Plain),
                ("alpha_star", Unit::Plain),
                ("leverage", Unit::Plain),
                ("kappa_h", Unit::Bps),
                ("theta_f", Unit::Plain),
            ]);
            for r in rows {
                t.push(vec![
                    r.venue.into(),
                    r.asset.into(),
                    r.alpha_star.into(),
                    r.leverage.into(),
                    (r.kappa_h_bps * BPS).into(),
                    r.theta_f.into(),
                ]);
            }
            Ok(t)
        }
        StaticTable::Grid => {
            let mut t = Table::new(&[
                ("venue", Unit::Plain),
                ("asset", Unit::Plain),
                ("stress", Unit::Plain),
                ("alpha_budget", Unit::Plain),
                ("alpha_economic", Unit::Plain),
                ("economic_binding", Unit::Plain),
                ("leverage_budget", Unit::Plain),
            ]);
            for (m, c) in markets.iter().zip(&cal) {
                for stress in STRESSES {
                    let problem = StaticProblem {
                        market: MarketParams::new(ctx.cfg.mu, c.sigma_raw * stress)?,
                        theta_f: c.theta_f,
                        capital: 1.0,
                        kappa_h: c.kappa_h,
                        h: ctx.cfg.h_years(),
                        lgd: ctx.cfg.lgd,
                        epsilon: ctx.cfg.epsilon,
                    };
                    let v2 = solve_variant2(&problem)?;
                    let v1 = solve_variant1(&problem)?;
                    let binding = match v1.binding {
                        Binding::Interior => "interior",
                        Binding::LowerBoundary => "lower",
                        Binding::UpperBoundary => "upper",
                        Binding::ConstraintActive => "constraint",
                    };
                    let mut row = label_cells(m);
                    row.extend([
                        stress.into(),
                        v2.alpha_star.into(),
                        v1.alpha_star.into(),
                        binding.into(),
                        ((1.0 - v2.alpha_star) / v2.alpha_star).into(),
                    ]);
                    t.push(row);
                }
            }
            Ok(t)
        }
    }
}

pub fn band(ctx: &Ctx) -> Result<Table> {
    let mut t = Table::new(&[
        ("venue", Unit::Plain),
        ("asset", Unit::Plain),
        ("target", Unit::Plain),
        ("alpha_l", Unit::Plain),
        ("k_reb", Unit::Bps),
        ("kappa_decision", Unit::Bps),
        ("delta_u", Unit::Plain),
        ("alpha_u", Unit::Plain),
        ("saturated", Unit::Plain),
    ]);
    for m in ctx.markets()? {
        let c = ctx.calibrate(m)?;
        let target = ctx.target(m, &c)?;
        let alpha_l = lower_bound(&MarketParams::new(ctx.cfg.mu, c.sigma)?, c.theta_f, &ctx.policy(c.kappa_decision))?;
        for &k in &ctx.cfg.k_reb_bps {
            let u = upper_bound(target, 1.0, c.kappa_decision, k * BPS, ctx.cfg.clip);
            let mut row = label_cells(m);
            row.extend([
                target.into(),
                alpha_l.into(),
                (k * BPS).into(),
                c.kappa_decision.into(),
                (u.alpha - target).into(),
                u.alpha.into(),
                u.saturated.into(),
            ]);
            t.push(row);
        }
    }
    Ok(t)
}

pub fn mc_upper(ctx: &Ctx) -> Result<Table> {
    let mut t = Table::new(&[
        ("venue", Unit::Plain),
        ("asset", Unit::Plain),
        ("target", Unit::Plain),
        ("k_reb", Unit::Bps),
        ("kappa_decision", Unit::Bps),
        ("alpha_u", Unit::Plain),
        ("hit_rate", Unit::Plain),
        ("median_hit_days", Unit::Days),
    ]);
    let sim = SimConfig {
        n_paths: ctx.cfg.mc_paths,
        dt: hours_to_years(ctx.cfg.mc_dt_hours),
        horizon: ctx.cfg.upper_horizon_days / 365.0,
        seed: ctx.seed(),
    };
    for m in ctx.markets()? {
        let c = ctx.calibrate(m)?;
        let target = ctx.target(m, &c)?;
        for &k in &ctx.cfg.k_reb_bps {
            let u = upper_bound(target, 1.0, c.kappa_decision, k * BPS, ctx.cfg.clip);
            let r = upper_hit_study(target, u.alpha, ctx.cfg.mu, c.sigma, ctx.cfg.upper_horizon_days, &sim)?;
            let mut row = label_cells(m);
            row.extend([
                target.into(),
                (k * BPS).into(),
                c.kappa_decision.into(),
                u.alpha.into(),
                r.hit_rate.into(),
                r.median_hit_days.into(),
            ]);
            t.push(row);
        }
    }
    Ok(t)
}

pub fn boot_lower(ctx: &Ctx) -> Result<Table> {
    let mut t = Table::new(&[
        ("venue", Unit::Plain),
        ("asset", Unit::Plain),
        ("target", Unit::Plain),
        ("alpha_l_boot", Unit::Plain),
        ("gap", Unit::Plain),
    ]);
    for m in ctx.markets()? {
        let c = ctx.calibrate(m)?;
        let target = ctx.target(m, &c)?;
        let returns = hourly_log_returns(&c.prices, ctx.cfg.lookback_days);
        let cfg = BootstrapConfig {
            block_hours: ctx.cfg.block_hours,
            path_hours: ctx.cfg.h_liq_hours.round() as usize,
            stress: ctx.cfg.stress,
            eps_liq: ctx.cfg.eps_liq,
            n_boot: ctx.cfg.n_boot,
            seed: ctx.seed(),
            theta_f: c.theta_f,
        };
        let a = bootstrap_lower_bound(&returns, &cfg)?;
        let r = BootstrapRow::new(m.venue.name.clone(), m.asset.clone(), target, a);
        t.push(vec![r.venue.into(), r.asset.into(), r.target.into(), r.alpha_l_boot.into(), r.gap.into()]);
    }
    Ok(t)
}

fn backtest_config(ctx: &Ctx, m: &Market, c: &Calibrated, funding: FundingSeries, label: &str) -> Result<BacktestConfig> {
    let cfg = ctx.cfg;
    let policy = ctx.policy(c.kappa_decision);
    let band = match (cfg.band_lower, cfg.band_target, cfg.band_upper) {
        (Some(l), Some(tgt), Some(u)) => AlphaBand::new(l, tgt, u, cfg.clip)?,
        _ => {
            let target = ctx.target(m, c)?;
            let lower = lower_bound(&MarketParams::new(cfg.mu, c.sigma)?, c.theta_f, &policy)?;
            let upper = upper_bound(target, 1.0, c.kappa_decision, cfg.k_fix_bps * BPS, cfg.clip).alpha;
            AlphaBand::new(lower, target, upper, cfg.clip).map_err(|_| {
                basis_core::Error::Infeasible(format!(
                    "{}: lower edge {lower:.4} is not below target {target:.4}",
                    m.label()
                ))
            })?
        }
    };
    Ok(BacktestConfig {
        ticker: m.asset.clone(),
        funding_source: label.to_string(),
        band,
        policy,
        exec_cost_bps: cfg.exec_cost_for(&m.asset)?,
        initial_aum: cfg.initial_aum,
        prices: c.prices.clone(),
        funding,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum BacktestTable {
    Report,
    Nav,
    Events,
}

pub fn backtest(ctx: &Ctx, which: BacktestTable) -> Result<Table> {
    let mut t = match which {
        BacktestTable::Report => Table::new(&[
            ("ticker", Unit::Plain),
            ("funding_env", Unit::Plain),
            ("acc_return", Unit::Percent),
            ("apy", Unit::Percent),
            ("max_dd", Unit::Percent),
            ("funding_apy", Unit::Percent),
            ("rebalances", Unit::Plain),
            ("turnover_notional", Unit::Usd),
            ("avg_alpha", Unit::Plain),
            ("avg_leverage", Unit::Plain),
            ("turnover_pct_initial_aum", Unit::Plain),
            ("avg_rebalance_pct_initial_aum", Unit::Plain),
            ("funding_return", Unit::Percent),
            ("cost_return", Unit::Percent),
            ("mark_return", Unit::Percent),
            ("ruined", Unit::Plain),
        ]),
        BacktestTable::Nav => Table::new(&[
            ("ticker", Unit::Plain),
            ("funding_env", Unit::Plain),
            ("timestamp_utc", Unit::Plain),
            ("nav", Unit::Usd),
        ]),
        BacktestTable::Events => Table::new(&[
            ("ticker", Unit::Plain),
            ("funding_env", Unit::Plain),
            ("timestamp_utc", Unit::Plain),
            ("event", Unit::Plain),
            ("alpha_before", Unit::Plain),
            ("alpha_after", Unit::Plain),
            ("notional", Unit::Usd),
            ("cost", Unit::Usd),
        ]),
    };
    for m in ctx.markets()? {
        let c = ctx.calibrate(m)?;
        let bt = backtest_config(ctx, m, &c, c.funding.clone(), &m.venue.name)?;
        let run = run_backtest(&bt)?;
        let head = || -> Vec<Cell> { vec![m.asset.clone().into(), m.venue.name.clone().into()] };
        match which {
            BacktestTable::Report => {
                let r = &run.report;
                let mut row = head();
                row.extend([
                    r.accumulated_return.into(),
                    r.apy.into(),
                    r.max_drawdown.into(),
                    r.funding_apy.into(),
                    r.rebalance_count.into(),
                    r.turnover_notional.into(),
                    r.avg_alpha.into(),
                    r.avg_leverage.into(),
                    r.turnover_pct_initial_aum.into(),
                    r.avg_rebalance_pct_initial_aum.into(),
                    r.funding_return.into(),
                    r.cost_return.into(),
                    r.mark_return.into(),
                    r.ruined.into(),
                ]);
                t.push(row);
            }
            BacktestTable::Nav => {
                for &(ts, v) in &run.nav {
                    let mut row = head();
                    row.extend([ts.into(), v.into()]);
                    t.push(row);
                }
            }
            BacktestTable::Events => {
                for e in &run.events {
                    let kind = match e.kind {
                        EventKind::Rebalance(ActionKind::BuyBasis) => "buy_basis",
                        EventKind::Rebalance(ActionKind::SellBasis) => "sell_basis",
                        EventKind::Rebalance(ActionKind::Hold) => "hold",
                        EventKind::Rebalance(ActionKind::Emergency) | EventKind::Emergency => "emergency",
                        EventKind::Ruin => "ruin",
                    };
                    let mut row = head();
                    row.extend([
                        e.timestamp.into(),
                        kind.into(),
                        finite(e.alpha_before),
                        finite(e.alpha_after),
                        e.notional.into(),
                        e.cost.into(),
                    ]);
                    t.push(row);
                }
            }
        }
    }
    Ok(t)
}

fn finite(v: f64) -> Cell {
    if v.is_finite() {
        Cell::Num(v)
    } else {
        Cell::Missing
    }
}

pub fn compare_funding(ctx: &Ctx) -> Result<Table> {
    let mut t = Table::new(&[
        ("ticker", Unit::Plain),
        ("venue", Unit::Plain),
        ("delta_apy", Unit::Percent),
        ("delta_funding_apy", Unit::Percent),
        ("delta_avg_leverage", Unit::Plain),
    ]);
    for m in ctx.markets()? {
        let c = ctx.calibrate(m)?;
        let alt = io::read_funding(&ctx.path("funding_alt", Some(m))?)?;
        let a = backtest_config(ctx, m, &c, c.funding.clone(), "base")?;
        let b = BacktestConfig {
            funding: alt,
            funding_source: "alt".into(),
            ..a.clone()
        };
        let d = compare_funding_envs(&a, &b)?;
        t.push(vec![
            d.ticker.into(),
            m.venue.name.clone().into(),
            d.delta_apy.into(),
            d.delta_funding_apy.into(),
            d.delta_avg_leverage.into(),
        ]);
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ExecTable {
    Summary,
    Buffers,
    Ci,
}

fn scope_name(s: Scope) -> String {
    s.to_string()
}

fn by_scope(trades: &[TradeRecord], scope: Scope) -> Vec<TradeRecord> {
    trades
        .iter()
        .copied()
        .filter(|t| match scope {
            Scope::All => true,
            Scope::Side(s) => t.side == s,
        })
        .collect()
}

const SCOPES: [Scope; 3] = [Scope::All, Scope::Side(Side::BuyBasis), Scope::Side(Side::SellBasis)];

pub fn exec_diag(ctx: &Ctx, which: ExecTable) -> Result<Table> {
    let trades = io::read_trades(&ctx.path("trades", None)?)?;
    if trades.is_empty() {
        return Err(basis_core::Error::EmptyInput.into());
    }
    let (filtered, post) = size_filter(&trades, ctx.cfg.q_min)?;
    match which {
        ExecTable::Summary => {
            let mut t = Table::new(&[
                ("sample", Unit::Plain),
                ("side", Unit::Plain),
                ("trades", Unit::Plain),
                ("median_cost", Unit::RawBps),
                ("win_rate", Unit::Percent),
                ("weighted_win_rate", Unit::Percent),
            ]);
            for (sample, rows) in [("raw", side_summary(&trades)), ("post_filter", post)] {
                for r in rows {
                    t.push(vec![
                        sample.into(),
                        scope_name(r.scope).into(),
                        r.trades.into(),
                        r.median_cost_bps.into(),
                        r.win_rate.into(),
                        r.weighted_win_rate.into(),
                    ]);
                }
            }
            Ok(t)
        }
        ExecTable::Buffers => {
            let mut t = Table::new(&[
                ("level", Unit::Percent),
                ("all", Unit::RawBps),
                ("buy_basis", Unit::RawBps),
                ("sell_basis", Unit::RawBps),
            ]);
            let grid = ctx.cfg.buffer_grid();
            let mut cols = Vec::new();
            for scope in SCOPES {
                let subset = by_scope(&filtered, scope);
                cols.push(if subset.is_empty() {
                    vec![None; ctx.cfg.buffer_levels.len()]
                } else {
                    buffer_curve(&subset, &ctx.cfg.buffer_levels, &grid)?
                });
            }
            for (i, &level) in ctx.cfg.buffer_levels.iter().enumerate() {
                t.push(vec![level.into(), cols[0][i].into(), cols[1][i].into(), cols[2][i].into()]);
            }
            Ok(t)
        }
        ExecTable::Ci => {
            let mut t = Table::new(&[
                ("sample", Unit::Plain),
                ("side", Unit::Plain),
                ("median_cost", Unit::RawBps),
                ("ci_lo", Unit::RawBps),
                ("ci_hi", Unit::RawBps),
            ]);
            for (sample, set) in [("raw", &trades), ("post_filter", &filtered)] {
                for scope in SCOPES {
                    let subset = by_scope(set, scope);
                    let cells: [Cell; 3] = match median_ci(&subset, ctx.cfg.ci_resamples, ctx.seed()) {
                        Ok(ci) => [ci.point.into(), ci.lo.into(), ci.hi.into()],
                        Err(basis_core::Error::InsufficientData(_)) => [Cell::Missing, Cell::Missing, Cell::Missing],
                        Err(e) => return Err(e.into()),
                    };
                    let mut row: Vec<Cell> = vec![sample.into(), scope_name(scope).into()];
                    row.extend(cells);
                    t.push(row);
                }
            }
            Ok(t)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CapacityTable {
    Summary,
    Series,
}

struct CapacityPoint {
    ts: i64,
    q_buy: Option<f64>,
    q_sell: Option<f64>,
    v_buy: f64,
    v_sell: f64,
    v_max: f64,
}

fn side_q_max(samples: &[CostSample], side: Side, window: i64, est: Estimator, budget: f64) -> Result<Option<f64>> {
    match operational_cost(samples, side, window, est) {
        Ok(curve) => Ok(max_executable_size(&curve, budget)),
        Err(basis_core::Error::EmptyInput) | Err(basis_core::Error::InsufficientData(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn capacity_cmd(ctx: &Ctx, which: CapacityTable) -> Result<Table> {
    let cfg = ctx.cfg;
    let mut samples = io::read_cost_curve(&ctx.path("cost_curve", None)?)?;
    if samples.is_empty() {
        return Err(basis_core::Error::EmptyInput.into());
    }
    samples.sort_by_key(|s| s.timestamp);
    let window = (cfg.cost_window_hours * SECONDS_PER_HOUR as f64).round() as i64;
    let est = cfg.cost_quantile.map_or(Estimator::Median, Estimator::Quantile);
    let inputs = CapacityInputs {
        alpha_t: cfg.capacity_alpha_t,
        target: cfg.capacity_target,
        budget_buy_bps: cfg.k_max_buy_bps,
        budget_sell_bps: cfg.k_max_sell_bps,
        q_min_buy: cfg.q_min,
        q_min_sell: cfg.q_min,
        equity: cfg.initial_aum,
    };
    let mut points = Vec::new();
    let mut i = 0;
    while i < samples.len() {
        let ts = samples[i].timestamp;
        while i < samples.len() && samples[i].timestamp == ts {
            i += 1;
        }
        let seen = &samples[..i];
        let q_buy = side_q_max(seen, Side::BuyBasis, window, est, inputs.budget_buy_bps)?;
        let q_sell = side_q_max(seen, Side::SellBasis, window, est, inputs.budget_sell_bps)?;
        // below the minimum size nothing useful can be executed
        let usable = |q: Option<f64>, q_min: f64| q.filter(|&v| v >= q_min).unwrap_or(0.0);
        let cap = capacity(&inputs, usable(q_buy, inputs.q_min_buy), usable(q_sell, inputs.q_min_sell));
        points.push(CapacityPoint {
            ts,
            q_buy,
            q_sell,
            v_buy: cap.buy,
            v_sell: cap.sell,
            v_max: cap.total,
        });
    }
    match which {
        CapacityTable::Series => {
            let mut t = Table::new(&[
                ("timestamp_utc", Unit::Plain),
                ("q_buy_max", Unit::Usd),
                ("q_sell_max", Unit::Usd),
                ("v_buy_max", Unit::Usd),
                ("v_sell_max", Unit::Usd),
                ("v_max", Unit::Usd),
            ]);
            for p in &points {
                t.push(vec![p.ts.into(), p.q_buy.into(), p.q_sell.into(), p.v_buy.into(), p.v_sell.into(), p.v_max.into()]);
            }
            Ok(t)
        }
        CapacityTable::Summary => {
            let series: Vec<f64> = points.iter().map(|p| p.v_max).collect();
            let mut t = Table::new(&[
                ("snapshots", Unit::Plain),
                ("phi", Unit::Plain),
                ("quantile", Unit::Plain),
                ("safe_capacity", Unit::Usd),
                ("median_capacity", Unit::Usd),
                ("latest_capacity", Unit::Usd),
            ]);
            t.push(vec![
                series.len().into(),
                (cfg.capacity_alpha_t - cfg.capacity_target).abs().into(),
                cfg.safe_quantile.into(),
                safe_capacity(&series, cfg.safe_quantile)?.into(),
                median(&series)?.into(),
                (*series.last().unwrap()).into(),
            ]);
            Ok(t)
        }
    }
}
