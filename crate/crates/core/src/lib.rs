//! Collateral control for spot-perpetual basis trades.
//!
//! The crate is organized bottom-up: [`model`] holds the position state and
//! the collateral-share maps, [`liquidation`] the barrier and first-passage
//! probability, [`static_control`] the target solvers, and [`dynamic`] the
//! band policy built on top of them. [`simulation`], [`backtest`],
//! [`calibration`] and [`execution`] supply the empirical layers.

pub mod backtest;
pub mod calibration;
pub mod dynamic;
pub mod error;
pub mod execution;
pub mod liquidation;
pub mod model;
pub mod simulation;
pub mod special;
pub mod static_control;
pub mod stats;

pub use error::{Error, Result};
