//! Readers for the input CSV schemas. All timestamps are integer Unix seconds.
//!
//! | file            | columns                                                               |
//! |-----------------|-----------------------------------------------------------------------|
//! | prices.csv      | timestamp_utc, price                                                  |
//! | funding.csv     | timestamp_utc, rate_fraction                                          |
//! | trades.csv      | timestamp_utc, side, notional_usd, target_cost_bps, realized_cost_bps |
//! | cost_curve.csv  | timestamp_utc, side, notional_usd, cost_bps                           |
//!
//! `side` is `buy_basis` or `sell_basis`; costs are positive when adverse.

use std::path::Path;

use basis_core::calibration::{FundingSeries, PriceSeries};
use basis_core::execution::{CostSample, Side, TradeRecord};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::{CliError, Result};

pub const PRICES_HEADER: &[&str] = &["timestamp_utc", "price"];
pub const FUNDING_HEADER: &[&str] = &["timestamp_utc", "rate_fraction"];
pub const TRADES_HEADER: &[&str] = &[
    "timestamp_utc",
    "side",
    "notional_usd",
    "target_cost_bps",
    "realized_cost_bps",
];
pub const COST_CURVE_HEADER: &[&str] = &["timestamp_utc", "side", "notional_usd", "cost_bps"];

#[derive(Deserialize)]
struct PriceRow {
    timestamp_utc: i64,
    price: f64,
}

#[derive(Deserialize)]
struct FundingRow {
    timestamp_utc: i64,
    rate_fraction: f64,
}

#[derive(Deserialize)]
struct TradeRow {
    timestamp_utc: i64,
    side: String,
    notional_usd: f64,
    target_cost_bps: f64,
    realized_cost_bps: f64,
}

#[derive(Deserialize)]
struct CostRow {
    timestamp_utc: i64,
    side: String,
    notional_usd: f64,
    cost_bps: f64,
}

fn schema(path: &Path, message: impl Into<String>) -> CliError {
    CliError::Csv {
        path: path.display().to_string(),
        message: message.into(),
    }
}

fn read_rows<T: DeserializeOwned>(path: &Path, header: &[&str]) -> Result<Vec<T>> {
    let file = std::fs::File::open(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let found: Vec<String> = reader
        .headers()
        .map_err(|e| schema(path, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if found != header {
        return Err(schema(path, format!("expected header {}, found {}", header.join(","), found.join(","))));
    }
    reader
        .deserialize()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| schema(path, format!("row {}: {e}", i + 2))))
        .collect()
}

fn core_schema(path: &Path, e: basis_core::Error) -> CliError {
    match e {
        basis_core::Error::Schema(m) => schema(path, m),
        other => other.into(),
    }
}

pub fn read_prices(path: &Path) -> Result<PriceSeries> {
    let rows: Vec<PriceRow> = read_rows(path, PRICES_HEADER)?;
    PriceSeries::new(rows.into_iter().map(|r| (r.timestamp_utc, r.price)).collect()).map_err(|e| core_schema(path, e))
}

pub fn read_funding(path: &Path) -> Result<FundingSeries> {
    let rows: Vec<FundingRow> = read_rows(path, FUNDING_HEADER)?;
    FundingSeries::new(rows.into_iter().map(|r| (r.timestamp_utc, r.rate_fraction)).collect())
        .map_err(|e| core_schema(path, e))
}

pub fn read_trades(path: &Path) -> Result<Vec<TradeRecord>> {
    let rows: Vec<TradeRow> = read_rows(path, TRADES_HEADER)?;
    rows.into_iter()
        .map(|r| {
            let side: Side = r.side.parse().map_err(|e| core_schema(path, e))?;
            TradeRecord::new(r.timestamp_utc, side, r.notional_usd, r.target_cost_bps, r.realized_cost_bps)
                .map_err(|e| core_schema(path, e))
        })
        .collect()
}

pub fn read_cost_curve(path: &Path) -> Result<Vec<CostSample>> {
    let rows: Vec<CostRow> = read_rows(path, COST_CURVE_HEADER)?;
    rows.into_iter()
        .map(|r| {
            let side: Side = r.side.parse().map_err(|e| core_schema(path, e))?;
            if !(r.notional_usd > 0.0) || !r.cost_bps.is_finite() {
                return Err(schema(path, "notional must be positive and cost finite"));
            }
            Ok(CostSample {
                timestamp: r.timestamp_utc,
                side,
                notional: r.notional_usd,
                cost_bps: r.cost_bps,
            })
        })
        .collect()
}
