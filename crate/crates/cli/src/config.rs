//! Flat `key = value` run configuration.
//!
//! Lines starting with `#` are comments. Lists are comma separated. Dataset
//! paths are grouped by calibration layer as `<layer>.<kind> = <template>`,
//! where the template may contain `{venue}` and `{asset}`; relative paths
//! resolve against the config file's directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use basis_core::liquidation::{MaintenanceRule, VenueSpec};

use crate::error::{CliError, Result};

pub const LOOKBACKS: [u32; 4] = [30, 90, 180, 360];
pub const STRESSES: [f64; 3] = [1.0, 1.5, 2.0];
pub const DATASET_KINDS: [&str; 5] = ["prices", "funding", "funding_alt", "trades", "cost_curve"];

/// One (venue, asset) pair with the venue's rule for that asset.
#[derive(Debug, Clone, PartialEq)]
pub struct Market {
    pub venue: VenueSpec,
    pub asset: String,
}

impl Market {
    pub fn label(&self) -> String {
        format!("{}:{}", self.venue.name, self.asset)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub markets: Vec<Market>,
    pub lookback_days: u32,
    pub stress: f64,
    pub epsilon: f64,
    pub lgd: f64,
    pub h_days: f64,
    pub mu: f64,
    pub h_liq_hours: f64,
    pub eps_liq: f64,
    pub clip: f64,
    pub k_reb_bps: Vec<f64>,
    pub k_fix_bps: f64,
    pub decision_horizon_days: u32,
    pub q_min: f64,
    pub seed: u64,
    pub mc_paths: usize,
    pub mc_dt_hours: f64,
    pub upper_horizon_days: f64,
    pub n_boot: usize,
    pub block_hours: usize,
    pub initial_aum: f64,
    pub exec_cost_bps: BTreeMap<String, f64>,
    pub buffer_levels: Vec<f64>,
    pub buffer_grid_max_bps: f64,
    pub buffer_grid_step_bps: f64,
    pub ci_resamples: usize,
    pub capacity_alpha_t: f64,
    pub capacity_target: f64,
    pub k_max_buy_bps: f64,
    pub k_max_sell_bps: f64,
    pub cost_window_hours: f64,
    /// `None` for the median, otherwise the quantile level.
    pub cost_quantile: Option<f64>,
    pub safe_quantile: f64,
    /// Frozen band for backtests; calibrated from the data when absent.
    pub band_target: Option<f64>,
    pub band_lower: Option<f64>,
    pub band_upper: Option<f64>,
    pub layer: String,
    pub datasets: BTreeMap<String, String>,
    pub base_dir: PathBuf,
}

fn market(venue: &str, asset: &str, l_max: u32, rule: MaintenanceRule) -> Market {
    Market {
        venue: VenueSpec::new(venue, l_max, rule),
        asset: asset.into(),
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        use MaintenanceRule::{FullInitial, HalfOfInitial};
        Self {
            markets: vec![
                market("binance", "BTC", 125, FullInitial),
                market("binance", "ETH", 100, FullInitial),
                market("binance", "LINK", 50, FullInitial),
                market("binance", "DOGE", 50, FullInitial),
                market("hyperliquid", "BTC", 40, HalfOfInitial),
                market("hyperliquid", "ETH", 25, HalfOfInitial),
                market("hyperliquid", "LINK", 10, HalfOfInitial),
                market("hyperliquid", "DOGE", 10, HalfOfInitial),
            ],
            lookback_days: 180,
            stress: 1.5,
            epsilon: 0.001,
            lgd: 0.1,
            h_days: 1.0,
            mu: 0.0,
            h_liq_hours: 3.0,
            eps_liq: 1e-4,
            clip: 0.99,
            k_reb_bps: vec![5.0, 10.0, 20.0, 30.0],
            k_fix_bps: 10.0,
            decision_horizon_days: 14,
            q_min: 10_000.0,
            seed: 0,
            mc_paths: 10_000,
            mc_dt_hours: 1.0,
            upper_horizon_days: 60.0,
            n_boot: 2_000_000,
            block_hours: 1,
            initial_aum: 1_000_000.0,
            exec_cost_bps: [("BTC", 20.0), ("ETH", 20.0), ("DOGE", 30.0), ("LINK", 30.0)]
                .into_iter()
                .map(|(a, c)| (a.to_string(), c))
                .collect(),
            buffer_levels: vec![0.90, 0.95, 0.98],
            buffer_grid_max_bps: 30.0,
            buffer_grid_step_bps: 1.0,
            ci_resamples: 2000,
            capacity_alpha_t: 0.045,
            capacity_target: 0.173,
            k_max_buy_bps: 20.0,
            k_max_sell_bps: 40.0,
            cost_window_hours: 24.0,
            cost_quantile: None,
            safe_quantile: 0.25,
            band_target: None,
            band_lower: None,
            band_upper: None,
            layer: "refreshed".into(),
            datasets: BTreeMap::new(),
            base_dir: PathBuf::from("."),
        }
    }
}

fn bad(key: &str, value: &str, why: &str) -> CliError {
    CliError::Config(format!("{key} = {value:?}: {why}"))
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| bad(key, value, "not a number"))
}

fn list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| num(key, s))
        .collect()
}

fn parse_rule(key: &str, s: &str) -> Result<MaintenanceRule> {
    match s {
        "half" => Ok(MaintenanceRule::HalfOfInitial),
        "full" => Ok(MaintenanceRule::FullInitial),
        other => other
            .parse::<f64>()
            .map(MaintenanceRule::CustomFraction)
            .map_err(|_| bad(key, s, "rule must be half, full or a fraction")),
    }
}

fn parse_markets(key: &str, value: &str) -> Result<Vec<Market>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let parts: Vec<&str> = item.split(':').map(str::trim).collect();
            let [venue, asset, l_max, rule] = parts[..] else {
                return Err(bad(key, item, "expected venue:asset:max_leverage:rule"));
            };
            Ok(market(venue, asset, num(key, l_max)?, parse_rule(key, rule)?))
        })
        .collect()
}

fn parse_costs(key: &str, value: &str) -> Result<BTreeMap<String, f64>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let (asset, bps) = item.split_once(':').ok_or_else(|| bad(key, item, "expected asset:bps"))?;
            Ok((asset.trim().to_string(), num(key, bps.trim())?))
        })
        .collect()
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut cfg = Self::parse(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", n + 1)))?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "markets" => self.markets = parse_markets(key, v)?,
            "lookback_days" => self.lookback_days = num(key, v)?,
            "stress" => self.stress = num(key, v)?,
            "epsilon" => self.epsilon = num(key, v)?,
            "lgd" => self.lgd = num(key, v)?,
            "h_days" => self.h_days = num(key, v)?,
            "mu" => self.mu = num(key, v)?,
            "h_liq_hours" => self.h_liq_hours = num(key, v)?,
            "eps_liq" => self.eps_liq = num(key, v)?,
            "clip" => self.clip = num(key, v)?,
            "k_reb_bps" => self.k_reb_bps = list(key, v)?,
            "k_fix_bps" => self.k_fix_bps = num(key, v)?,
            "decision_horizon_days" => self.decision_horizon_days = num(key, v)?,
            "q_min" => self.q_min = num(key, v)?,
            "seed" => self.seed = num(key, v)?,
            "mc_paths" => self.mc_paths = num(key, v)?,
            "mc_dt_hours" => self.mc_dt_hours = num(key, v)?,
            "upper_horizon_days" => self.upper_horizon_days = num(key, v)?,
            "n_boot" => self.n_boot = num(key, v)?,
            "block_hours" => self.block_hours = num(key, v)?,
            "initial_aum" => self.initial_aum = num(key, v)?,
            "exec_cost_bps" => self.exec_cost_bps = parse_costs(key, v)?,
            "buffer_levels" => self.buffer_levels = list(key, v)?,
            "buffer_grid_max_bps" => self.buffer_grid_max_bps = num(key, v)?,
            "buffer_grid_step_bps" => self.buffer_grid_step_bps = num(key, v)?,
            "ci_resamples" => self.ci_resamples = num(key, v)?,
            "capacity_alpha_t" => self.capacity_alpha_t = num(key, v)?,
            "capacity_target" => self.capacity_target = num(key, v)?,
            "k_max_buy_bps" => self.k_max_buy_bps = num(key, v)?,
            "k_max_sell_bps" => self.k_max_sell_bps = num(key, v)?,
            "cost_window_hours" => self.cost_window_hours = num(key, v)?,
            "cost_estimator" => {
                self.cost_quantile = match v {
                    "median" => None,
                    q => Some(num(key, q.trim_start_matches('q'))?),
                }
            }
            "safe_quantile" => self.safe_quantile = num(key, v)?,
            "band_target" => self.band_target = Some(num(key, v)?),
            "band_lower" => self.band_lower = Some(num(key, v)?),
            "band_upper" => self.band_upper = Some(num(key, v)?),
            "layer" => self.layer = v.to_string(),
            _ => match key.split_once('.') {
                Some((layer, kind)) if DATASET_KINDS.contains(&kind) && !layer.is_empty() => {
                    self.datasets.insert(key.to_string(), v.to_string());
                }
                _ => return Err(CliError::Config(format!("unknown key '{key}'"))),
            },
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(CliError::Config(m));
        if !LOOKBACKS.contains(&self.lookback_days) {
            return fail(format!("lookback_days must be one of {LOOKBACKS:?}, got {}", self.lookback_days));
        }
        if !STRESSES.contains(&self.stress) {
            return fail(format!("stress must be one of {STRESSES:?}, got {}", self.stress));
        }
        if self.markets.is_empty() {
            return fail("markets must not be empty".into());
        }
        for m in &self.markets {
            m.venue.theta_f().map_err(|e| CliError::Config(format!("market {}: {e}", m.label())))?;
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) || !(self.eps_liq > 0.0 && self.eps_liq < 1.0) {
            return fail("epsilon and eps_liq must lie in (0,1)".into());
        }
        if !(self.h_days > 0.0 && self.h_liq_hours > 0.0 && self.decision_horizon_days > 0) {
            return fail("horizons must be positive".into());
        }
        if !(self.clip > 0.0 && self.clip < 1.0) {
            return fail(format!("clip must lie in (0,1), got {}", self.clip));
        }
        if self.mc_paths == 0 || !(self.mc_dt_hours > 0.0) || !(self.upper_horizon_days > 0.0) {
            return fail("mc_paths, mc_dt_hours and upper_horizon_days must be positive".into());
        }
        if !(self.buffer_grid_step_bps > 0.0) || !(self.buffer_grid_max_bps >= 0.0) {
            return fail("buffer grid must have a positive step".into());
        }
        if let Some(q) = self.cost_quantile {
            if !(0.0..=1.0).contains(&q) {
                return fail(format!("cost_estimator quantile must lie in [0,1], got {q}"));
            }
        }
        if !(self.safe_quantile > 0.0 && self.safe_quantile < 1.0) {
            return fail(format!("safe_quantile must lie in (0,1), got {}", self.safe_quantile));
        }
        Ok(())
    }

    pub fn h_years(&self) -> f64 {
        self.h_days / 365.0
    }

    pub fn horizon_hours(&self) -> u32 {
        (self.h_days * 24.0).round() as u32
    }

    pub fn exec_cost_for(&self, asset: &str) -> Result<f64> {
        self.exec_cost_bps
            .get(asset)
            .copied()
            .ok_or_else(|| CliError::Config(format!("no exec_cost_bps entry for asset {asset}")))
    }

    pub fn buffer_grid(&self) -> Vec<f64> {
        let n = (self.buffer_grid_max_bps / self.buffer_grid_step_bps + 1e-9).floor() as usize;
        (0..=n).map(|k| k as f64 * self.buffer_grid_step_bps).collect()
    }

    /// Path of a dataset for one market in the active layer, if configured.
    pub fn dataset(&self, kind: &str, market: &Market) -> Option<PathBuf> {
        let template = self.datasets.get(&format!("{}.{kind}", self.layer))?;
        let path = template
            .replace("{venue}", &market.venue.name)
            .replace("{asset}", &market.asset);
        let p = PathBuf::from(path);
        Some(if p.is_absolute() { p } else { self.base_dir.join(p) })
    }
}
