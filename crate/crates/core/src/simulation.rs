//! Seeded GBM paths, the Monte Carlo first-passage estimator, the time-to-
//! upper-boundary study, and the historical bootstrap of the lower edge.
//!
//! Every path draws from its own ChaCha stream (`set_stream(path_index)`), so
//! results depend only on the inputs and the seed, never on thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::liquidation::barrier_z;
use crate::model::{days_to_years, DAYS_PER_YEAR};
use crate::static_control::{ALPHA_MAX, ALPHA_MIN};
use crate::stats::median;

/// Bridge crossing probabilities below `exp(-BRIDGE_CUTOFF)` are dropped.
const BRIDGE_CUTOFF: f64 = 40.0;

const BOOT_GRID_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub n_paths: usize,
    /// Step in years; shrunk so an integer number of steps spans the horizon.
    pub dt: f64,
    /// Horizon in years.
    pub horizon: f64,
    pub seed: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(invalid("n_paths must be at least 1"));
        }
        if !(self.dt > 0.0) {
            return Err(invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.horizon >= self.dt) {
            return Err(invalid(format!(
                "horizon {} must be at least one step {}",
                self.horizon, self.dt
            )));
        }
        Ok(())
    }

    /// Number of steps and the step actually used.
    pub fn grid(&self) -> (usize, f64) {
        let n = (self.horizon / self.dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        (n, self.horizon / n as f64)
    }
}

fn path_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

#[cfg(feature = "parallel")]
fn map_paths<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_paths<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
fn count_paths<F>(n: usize, f: F) -> u64
where
    F: Fn(usize) -> bool + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().filter(|&i| f(i)).count() as u64
}

#[cfg(not(feature = "parallel"))]
fn count_paths<F>(n: usize, f: F) -> u64
where
    F: Fn(usize) -> bool,
{
    (0..n).filter(|&i| f(i)).count() as u64
}

/// A GBM ensemble generated on demand from its seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GbmEnsemble {
    pub mu: f64,
    pub sigma: f64,
    pub p0: f64,
    pub cfg: SimConfig,
    steps: usize,
    step: f64,
}

pub fn simulate_gbm(mu: f64, sigma: f64, p0: f64, cfg: SimConfig) -> Result<GbmEnsemble> {
    cfg.validate()?;
    if !(sigma >= 0.0) || !(p0 > 0.0) {
        return Err(invalid("sigma must be nonnegative and p0 positive"));
    }
    let (steps, step) = cfg.grid();
    Ok(GbmEnsemble {
        mu,
        sigma,
        p0,
        cfg,
        steps,
        step,
    })
}

impl GbmEnsemble {
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Prices of path `index` at times `0, step, ..., horizon`.
    pub fn path(&self, index: usize) -> Vec<f64> {
        let mut rng = path_rng(self.cfg.seed, index);
        let drift = (self.mu - 0.5 * self.sigma * self.sigma) * self.step;
        let vol = self.sigma * self.step.sqrt();
        let mut out = Vec::with_capacity(self.steps + 1);
        let mut x = 0.0;
        out.push(self.p0);
        for _ in 0..self.steps {
            let z: f64 = rng.sample(StandardNormal);
            x += drift + vol * z;
            out.push(self.p0 * x.exp());
        }
        out
    }

    pub fn terminal_prices(&self) -> Vec<f64> {
        map_paths(self.cfg.n_paths, |i| *self.path(i).last().unwrap())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub n_paths: usize,
}

impl McEstimate {
    fn from_hits(hits: u64, n: usize) -> Self {
        let p = hits as f64 / n as f64;
        Self {
            estimate: p,
            stderr: (p * (1.0 - p) / n as f64).sqrt(),
            n_paths: n,
        }
    }
}

/// Monte Carlo probability that `p_t / p0` reaches the liquidation barrier
/// within `h` years. `h` replaces `cfg.horizon`; `cfg.dt` must be at most
/// `h / 100`.
///
/// Between grid points the crossing is resolved with the Brownian-bridge
/// probability `exp(-2 (b - x0)(b - x1) / (sigma^2 dt))`, so the estimator
/// targets continuous monitoring rather than the grid.
pub fn mc_first_passage(
    alpha: f64,
    theta_f: f64,
    mu: f64,
    sigma: f64,
    h: f64,
    cfg: &SimConfig,
) -> Result<McEstimate> {
    if !(h > 0.0) {
        return Err(invalid(format!("horizon must be positive, got {h}")));
    }
    let cfg = SimConfig { horizon: h, ..*cfg };
    cfg.validate()?;
    if cfg.dt > h / 100.0 * (1.0 + 1e-12) {
        return Err(invalid(format!("dt {} exceeds h/100 = {}", cfg.dt, h / 100.0)));
    }
    if !(sigma >= 0.0) {
        return Err(invalid(format!("sigma must be nonnegative, got {sigma}")));
    }
    let z = barrier_z(alpha, theta_f)?;
    if z <= 1.0 {
        return Ok(McEstimate {
            estimate: 1.0,
            stderr: 0.0,
            n_paths: cfg.n_paths,
        });
    }
    let b = z.ln();
    let (steps, step) = cfg.grid();
    let drift = (mu - 0.5 * sigma * sigma) * step;
    let vol = sigma * step.sqrt();
    let var = sigma * sigma * step;

    let hit = |i: usize| -> bool {
        let mut rng = path_rng(cfg.seed, i);
        let mut x = 0.0f64;
        let mut survive = 1.0f64;
        for _ in 0..steps {
            let e: f64 = rng.sample(StandardNormal);
            let next = x + drift + vol * e;
            if next >= b {
                return true;
            }
            if var > 0.0 {
                let expo = 2.0 * (b - x) * (b - next) / var;
                if expo < BRIDGE_CUTOFF {
                    survive *= 1.0 - (-expo).exp();
                }
            }
            x = next;
        }
        survive < 1.0 && rng.random::<f64>() >= survive
    };
    let hits = count_paths(cfg.n_paths, hit);
    Ok(McEstimate::from_hits(hits, cfg.n_paths))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitStudyResult {
    pub hit_rate: f64,
    /// Median first-hit time in days among paths that hit.
    pub median_hit_days: Option<f64>,
    pub n_paths: usize,
}

/// Default horizon of the upper-boundary study, in days.
pub const DEFAULT_UPPER_STUDY_DAYS: f64 = 60.0;

/// How often, and how fast, the marked collateral share drifts from `alpha0`
/// up to `alpha_u` under GBM. Monitored on the `cfg.dt` grid over
/// `horizon_days`, which replaces `cfg.horizon`.
pub fn upper_hit_study(
    alpha0: f64,
    alpha_u: f64,
    mu: f64,
    sigma: f64,
    horizon_days: f64,
    cfg: &SimConfig,
) -> Result<HitStudyResult> {
    if !(alpha0 > 0.0 && alpha0 < 1.0) {
        return Err(invalid(format!("alpha0 must lie in (0,1), got {alpha0}")));
    }
    if !(alpha_u >= alpha0 && alpha_u < 1.0) {
        return Err(invalid(format!("alpha_U must lie in [alpha0, 1), got {alpha_u}")));
    }
    let cfg = SimConfig {
        horizon: days_to_years(horizon_days),
        ..*cfg
    };
    let ens = simulate_gbm(mu, sigma, 1.0, cfg)?;
    // alpha_t >= alpha_u  <=>  p_t / p0 <= (1 - alpha_u) / (1 - alpha0)
    let floor = ((1.0 - alpha_u) / (1.0 - alpha0)).ln();
    let (steps, step) = (ens.steps, ens.step);
    let drift = (mu - 0.5 * sigma * sigma) * step;
    let vol = sigma * step.sqrt();

    let times: Vec<Option<f64>> = map_paths(cfg.n_paths, |i| {
        if floor >= 0.0 {
            return Some(0.0);
        }
        let mut rng = path_rng(cfg.seed, i);
        let mut x = 0.0;
        for k in 1..=steps {
            let e: f64 = rng.sample(StandardNormal);
            x += drift + vol * e;
            if x <= floor {
                return Some(k as f64 * step * DAYS_PER_YEAR);
            }
        }
        None
    });
    let hit_days: Vec<f64> = times.into_iter().flatten().collect();
    let hit_rate = hit_days.len() as f64 / cfg.n_paths as f64;
    let median_hit_days = if hit_days.is_empty() {
        None
    } else {
        Some(median(&hit_days)?)
    };
    Ok(HitStudyResult {
        hit_rate,
        median_hit_days,
        n_paths: cfg.n_paths,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapConfig {
    pub block_hours: usize,
    pub path_hours: usize,
    pub stress: f64,
    pub eps_liq: f64,
    pub n_boot: usize,
    pub seed: u64,
    /// Venue maintenance fraction that sets the barrier.
    pub theta_f: f64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            block_hours: 1,
            path_hours: 3,
            stress: 1.5,
            eps_liq: 1e-4,
            n_boot: 2_000_000,
            seed: 0,
            theta_f: 0.0125,
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.block_hours == 0 || self.path_hours == 0 || self.path_hours % self.block_hours != 0 {
            return Err(invalid(format!(
                "path_hours {} must be a positive multiple of block_hours {}",
                self.path_hours, self.block_hours
            )));
        }
        if !(self.stress > 0.0) {
            return Err(invalid(format!("stress must be positive, got {}", self.stress)));
        }
        if !(self.eps_liq > 0.0 && self.eps_liq < 1.0) {
            return Err(invalid(format!("eps_liq must lie in (0,1), got {}", self.eps_liq)));
        }
        if !(self.theta_f > 0.0 && self.theta_f < 1.0) {
            return Err(invalid(format!("theta_F must lie in (0,1), got {}", self.theta_f)));
        }
        if (self.n_boot as f64) < 10.0 / self.eps_liq {
            return Err(Error::UnresolvableQuantile {
                n_boot: self.n_boot,
                eps: self.eps_liq,
            });
        }
        Ok(())
    }
}

/// Smallest share on a `1e-3` grid whose empirical breach frequency over
/// resampled short paths stays within `eps_liq`. Shares at or below the
/// immediate-liquidation point count as breached on every path.
pub fn bootstrap_lower_bound(hourly_log_returns: &[f64], cfg: &BootstrapConfig) -> Result<f64> {
    cfg.validate()?;
    if hourly_log_returns.len() < 100 {
        return Err(Error::InsufficientData(format!(
            "bootstrap needs at least 100 hourly returns, got {}",
            hourly_log_returns.len()
        )));
    }
    let src = hourly_log_returns;
    if src.len() < cfg.block_hours {
        return Err(Error::InsufficientData("fewer returns than one block".into()));
    }
    let n_starts = src.len() - cfg.block_hours + 1;
    let blocks = cfg.path_hours / cfg.block_hours;

    let mut maxima = map_paths(cfg.n_boot, |i| {
        let mut rng = path_rng(cfg.seed, i);
        let mut x = 0.0f64;
        let mut m = 0.0f64;
        for _ in 0..blocks {
            let start = rng.random_range(0..n_starts);
            for r in &src[start..start + cfg.block_hours] {
                x += cfg.stress * r;
                m = m.max(x);
            }
        }
        m
    });
    maxima.sort_by(|a, b| a.total_cmp(b));
    let budget = cfg.eps_liq * cfg.n_boot as f64;

    let n_grid = ((ALPHA_MAX - ALPHA_MIN) / BOOT_GRID_STEP).floor() as usize;
    for k in 0..=n_grid {
        let alpha = ALPHA_MIN + k as f64 * BOOT_GRID_STEP;
        let z = barrier_z(alpha, cfg.theta_f)?;
        if z <= 1.0 {
            continue;
        }
        let lb = z.ln();
        let breaches = maxima.len() - maxima.partition_point(|&m| m < lb);
        if breaches as f64 <= budget {
            return Ok(alpha);
        }
    }
    Err(Error::Infeasible(format!(
        "no share up to {ALPHA_MAX} meets the bootstrap budget {}",
        cfg.eps_liq
    )))
}

/// One row of the bootstrap robustness table.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapRow {
    pub venue: String,
    pub asset: String,
    pub target: f64,
    pub alpha_l_boot: f64,
    pub gap: f64,
}

impl BootstrapRow {
    pub fn new(venue: impl Into<String>, asset: impl Into<String>, target: f64, alpha_l_boot: f64) -> Self {
        Self {
            venue: venue.into(),
            asset: asset.into(),
            target,
            alpha_l_boot,
            gap: target - alpha_l_boot,
        }
    }
}
