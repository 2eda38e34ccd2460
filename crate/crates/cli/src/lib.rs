//! Command-line front end for `switchdyn`: TOML configuration in, CSV out.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub use config::{load_config, parse_config, Config};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Numeric(switchdyn::Error),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<switchdyn::Error> for CliError {
    fn from(e: switchdyn::Error) -> Self {
        if e.is_input_error() {
            CliError::Config(e.to_string())
        } else {
            CliError::Numeric(e)
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "switchdyn", version, about = "Switching dynamics of reluctance actuators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct Io {
    /// TOML configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output CSV file; companion files are written next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the hybrid automaton as set up in [simulation].
    Simulate(Io),
    /// Equilibria of the hybrid automaton at one supply voltage.
    Equilibria {
        #[command(flatten)]
        io: Io,
        /// Supply voltage (V).
        #[arg(long, allow_hyphen_values = true)]
        u: f64,
    },
    /// Critical voltages, gaps and fluxes.
    Critical(Io),
    /// Equilibrium branches over the voltage range in [sweep].
    Sweep(Io),
    /// Hysteresis loop between the stops, as set up in [hysteresis].
    Hysteresis(Io),
}

/// Runs one subcommand. Warnings meant for stderr are returned.
pub fn run(cli: &Cli) -> Result<Vec<String>, CliError> {
    use commands::*;
    let io = match &cli.command {
        Command::Simulate(io) | Command::Critical(io) | Command::Sweep(io) | Command::Hysteresis(io) => io,
        Command::Equilibria { io, .. } => io,
    };
    let cfg = load_config(&io.config)?;
    let mut warnings = Vec::new();
    match &cli.command {
        Command::Simulate(_) => cmd_simulate(&cfg, &io.out)?,
        Command::Equilibria { u, .. } => cmd_equilibria(&cfg, *u, &io.out)?,
        Command::Critical(_) => cmd_critical(&cfg, &io.out)?,
        Command::Sweep(_) => cmd_sweep(&cfg, &io.out)?,
        Command::Hysteresis(_) => warnings.extend(cmd_hysteresis(&cfg, &io.out)?),
    }
    Ok(warnings)
}
