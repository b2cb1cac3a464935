//! Synthetic input files shared by the integration tests.

#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub const HOUR: i64 = 3600;
pub const START: i64 = 1_700_000_000 - 1_700_000_000 % HOUR;

pub struct Dataset {
    pub dir: tempfile::TempDir,
}

impl Dataset {
    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

/// Hourly GBM prices and 8-hour funding over `days`, plus a trade log and a
/// cost-curve file.
pub fn synthetic(days: usize, sigma: f64, seed: u64) -> Dataset {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hours = days * 24;
    let step = Normal::new(-0.5 * sigma * sigma / 8760.0, sigma / 8760f64.sqrt()).unwrap();

    let mut prices = String::from("timestamp_utc,price\n");
    let mut p = 30_000.0f64;
    for i in 0..=hours {
        writeln!(prices, "{},{p}", START + i as i64 * HOUR).unwrap();
        p *= step.sample(&mut rng).exp();
    }
    write(dir.path(), "prices.csv", &prices);

    let rates = Normal::new(1e-4, 6e-5).unwrap();
    for name in ["funding.csv", "funding_alt.csv"] {
        let mut f = String::from("timestamp_utc,rate_fraction\n");
        for k in 1..=hours / 8 {
            writeln!(f, "{},{}", START + (k * 8) as i64 * HOUR, rates.sample(&mut rng)).unwrap();
        }
        write(dir.path(), name, &f);
    }

    let mut trades = String::from("timestamp_utc,side,notional_usd,target_cost_bps,realized_cost_bps\n");
    for i in 0..400 {
        let side = if rng.random::<bool>() { "buy_basis" } else { "sell_basis" };
        let notional = 10f64.powf(rng.random_range(3.0..6.0));
        let target = rng.random_range(5.0..40.0);
        let realized = target + rng.random_range(-15.0..20.0);
        writeln!(trades, "{},{side},{notional},{target},{realized}", START + i * HOUR).unwrap();
    }
    write(dir.path(), "trades.csv", &trades);

    let mut curve = String::from("timestamp_utc,side,notional_usd,cost_bps\n");
    for snap in 0..48i64 {
        let depth = rng.random_range(0.6..1.6);
        for side in ["buy_basis", "sell_basis"] {
            for k in 0..8 {
                let q = 5_000.0 * 2f64.powi(k);
                let c = 1.0 + q / (20_000.0 * depth) + rng.random_range(0.0..1.0);
                writeln!(curve, "{},{side},{q},{c}", START + snap * HOUR).unwrap();
            }
        }
    }
    write(dir.path(), "cost_curve.csv", &curve);
    Dataset { dir }
}

pub fn basisctl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_basisctl")).args(args).output().unwrap()
}

/// Invocations covering every subcommand and table against `data`.
pub fn every_invocation(data: &Dataset) -> Vec<Vec<String>> {
    let file = |n: &str| data.path(n).display().to_string();
    let market = ["--market".to_string(), "binance:BTC".to_string()];
    let series = [
        "--prices".to_string(),
        file("prices.csv"),
        "--funding".to_string(),
        file("funding.csv"),
    ];
    let mut out = Vec::new();
    let per_market = |sub: &[&str]| {
        let mut v: Vec<String> = sub.iter().map(|s| s.to_string()).collect();
        v.extend(market.iter().cloned());
        v.extend(series.iter().cloned());
        v
    };
    for sub in [
        &["calibrate", "--table", "vol"][..],
        &["calibrate", "--table", "stats"],
        &["static", "--table", "slice"],
        &["static", "--table", "grid"],
        &["band"],
        &["mc-upper"],
        &["boot-lower"],
        &["backtest", "--table", "report"],
        &["backtest", "--table", "nav"],
        &["backtest", "--table", "events"],
    ] {
        out.push(per_market(sub));
    }
    let mut cmp = per_market(&["compare-funding"]);
    cmp.extend(["--funding-alt".to_string(), file("funding_alt.csv")]);
    out.push(cmp);
    for t in ["summary", "buffers", "ci"] {
        out.push(vec!["exec-diag".into(), "--table".into(), t.into(), "--trades".into(), file("trades.csv")]);
    }
    for t in ["summary", "series"] {
        out.push(vec!["capacity".into(), "--table".into(), t.into(), "--cost-curve".into(), file("cost_curve.csv")]);
    }
    out
}
