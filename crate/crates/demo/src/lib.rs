//! WebAssembly bindings for the browser demo in `www/`.

use basis_core::dynamic::{lower_bound, upper_bound, PolicyConfig};
use basis_core::liquidation::{liq_probability, BarrierProblem};
use basis_core::model::{hours_to_years, leverage_path as leverage_at, MarketParams};
use basis_core::simulation::{simulate_gbm, SimConfig};
use wasm_bindgen::prelude::*;

const BPS: f64 = 1e-4;

fn js(e: basis_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Liquidation probability at `n` evenly spaced shares in `[alpha_lo, alpha_hi]`.
#[wasm_bindgen]
pub fn liquidation_curve(
    theta_f: f64,
    sigma: f64,
    mu: f64,
    horizon_hours: f64,
    alpha_lo: f64,
    alpha_hi: f64,
    n: usize,
) -> Result<Vec<f64>, JsError> {
    if n < 2 || !(alpha_lo < alpha_hi) {
        return Err(JsError::new("need n >= 2 and alpha_lo < alpha_hi"));
    }
    let h = hours_to_years(horizon_hours);
    (0..n)
        .map(|i| {
            let alpha = alpha_lo + (alpha_hi - alpha_lo) * i as f64 / (n - 1) as f64;
            liq_probability(&BarrierProblem { alpha, theta_f, sigma, mu, h }).map_err(js)
        })
        .collect()
}

/// Hourly hedge leverage along one simulated price path. Entries after the
/// share first reaches zero are NaN.
#[wasm_bindgen]
pub fn leverage_path(alpha0: f64, sigma: f64, mu: f64, days: f64, seed: u64) -> Result<Vec<f64>, JsError> {
    let cfg = SimConfig {
        n_paths: 1,
        dt: hours_to_years(1.0),
        horizon: days / 365.0,
        seed,
    };
    let prices = simulate_gbm(mu, sigma, 1.0, cfg).map_err(js)?.path(0);
    let mut alive = true;
    Ok(prices
        .iter()
        .map(|&ratio| {
            if alive {
                match leverage_at(alpha0, ratio) {
                    Ok(l) => return l,
                    Err(_) => alive = false,
                }
            }
            f64::NAN
        })
        .collect())
}

/// Band edges `[lower, target, upper, saturated]`, with `saturated` as 0 or 1.
#[wasm_bindgen]
pub fn band(
    target: f64,
    sigma: f64,
    theta_f: f64,
    kappa_bps: f64,
    k_reb_bps: f64,
    h_liq_hours: f64,
    eps_liq: f64,
) -> Result<Vec<f64>, JsError> {
    let cfg = PolicyConfig {
        h_liq_hours,
        eps_liq,
        ..PolicyConfig::default()
    };
    let lower = lower_bound(&MarketParams::new(0.0, sigma).map_err(js)?, theta_f, &cfg).map_err(js)?;
    let u = upper_bound(target, 1.0, kappa_bps * BPS, k_reb_bps * BPS, 0.99);
    Ok(vec![lower, target, u.alpha, if u.saturated { 1.0 } else { 0.0 }])
}
