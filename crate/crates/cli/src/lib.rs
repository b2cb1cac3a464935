//! Command-line front end over `basis_core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod table;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::{BacktestTable, CalibrateTable, CapacityTable, Ctx, ExecTable, Inputs, StaticTable};
use config::RunConfig;
use error::{CliError, Result};
use table::Format;

#[derive(Debug, Parser)]
#[command(name = "basisctl", version, about = "Collateral control for spot-perpetual basis trades")]
pub struct Cli {
    /// Flat key = value configuration file; benchmark defaults when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the table here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Restrict per-market commands to one `venue:asset`.
    #[arg(long, global = true)]
    pub market: Option<String>,
    /// Dataset layer to read paths from (e.g. refreshed, historical, live).
    #[arg(long, global = true)]
    pub layer: Option<String>,
    #[arg(long, global = true)]
    pub prices: Option<PathBuf>,
    #[arg(long, global = true)]
    pub funding: Option<PathBuf>,
    #[arg(long, global = true)]
    pub funding_alt: Option<PathBuf>,
    #[arg(long, global = true)]
    pub trades: Option<PathBuf>,
    #[arg(long, global = true)]
    pub cost_curve: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Volatility, carry and funding-window statistics.
    Calibrate {
        #[arg(long, value_enum, default_value_t = CalibrateTable::Vol)]
        table: CalibrateTable,
    },
    /// Static targets: benchmark slice or stress grid.
    Static {
        #[arg(long, value_enum, default_value_t = StaticTable::Slice)]
        table: StaticTable,
    },
    /// Lower and upper band edges per rebalance-cost scenario.
    Band,
    /// Time-to-upper-edge Monte Carlo study.
    McUpper,
    /// Historical bootstrap of the lower edge.
    BootLower,
    /// Hourly historical backtest of the band policy.
    Backtest {
        #[arg(long, value_enum, default_value_t = BacktestTable::Report)]
        table: BacktestTable,
    },
    /// Change in backtest metrics between two funding streams.
    CompareFunding,
    /// Execution-quality diagnostics over a trade log.
    ExecDiag {
        #[arg(long, value_enum, default_value_t = ExecTable::Summary)]
        table: ExecTable,
    },
    /// Liquidity capacity from cost-curve snapshots.
    Capacity {
        #[arg(long, value_enum, default_value_t = CapacityTable::Summary)]
        table: CapacityTable,
    },
}

/// Runs one invocation and returns the rendered table.
pub fn run(cli: &Cli) -> Result<String> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(l) = &cli.layer {
        cfg.layer = l.clone();
    }
    let inputs = Inputs {
        prices: cli.prices.clone(),
        funding: cli.funding.clone(),
        funding_alt: cli.funding_alt.clone(),
        trades: cli.trades.clone(),
        cost_curve: cli.cost_curve.clone(),
    };
    let ctx = Ctx {
        cfg: &cfg,
        inputs: &inputs,
        market: cli.market.as_deref(),
    };
    let table = match &cli.command {
        Command::Calibrate { table } => commands::calibrate(&ctx, *table)?,
        Command::Static { table } => commands::static_cmd(&ctx, *table)?,
        Command::Band => commands::band(&ctx)?,
        Command::McUpper => commands::mc_upper(&ctx)?,
        Command::BootLower => commands::boot_lower(&ctx)?,
        Command::Backtest { table } => commands::backtest(&ctx, *table)?,
        Command::CompareFunding => commands::compare_funding(&ctx)?,
        Command::ExecDiag { table } => commands::exec_diag(&ctx, *table)?,
        Command::Capacity { table } => commands::capacity_cmd(&ctx, *table)?,
    };
    table.render(cli.format)
}

/// Writes the output where the invocation asked for it.
pub fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
                // a closed reader (e.g. `| head`) is not an error
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                r => r.map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                }),
            }
        }
    }
}
