//! Command-line front end: argument parsing, config loading and the five
//! subcommands. `main.rs` only maps [`CliError`] to an exit code.

pub mod commands;
pub mod config;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;
use thz_core::channel::ChannelError;
use thz_core::simulator::{Objective, SimError};

/// Environment variable that redirects relative output paths.
pub const OUT_DIR_ENV: &str = "THZSIM_OUT_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Infeasible(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<ChannelError> for CliError {
    fn from(e: ChannelError) -> Self {
        match e {
            ChannelError::OutOfRange { .. } | ChannelError::Domain(_) => CliError::Config(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Channel(c) => c.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Coverage,
    PeakThroughput,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Coverage => Objective::Coverage,
            ObjectiveArg::PeakThroughput => Objective::PeakThroughput,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "thzsim", version, about = "Indoor terahertz link simulator")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Absorption table CSV (`rho_g_m3,f_ghz,atten_db_km`); defaults to the bundled table.
    #[arg(long, global = true)]
    pub absorption: Option<PathBuf>,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed; overrides the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
    /// Worker threads for parallel sections; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spreading, absorption and total path loss over a frequency grid.
    Loss(LossArgs),
    /// Distance-indexed frequency-window lookup table.
    Windows(WindowsArgs),
    /// Minimum beamwidth over a frequency and distance grid.
    Minbw(MinbwArgs),
    /// Run one slotted simulation.
    Simulate(SimulateArgs),
    /// Sweep the beamwidth and report the optimum.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct LossArgs {
    #[arg(long, default_value_t = 100.0)]
    pub f_lo: f64,
    #[arg(long, default_value_t = 1000.0)]
    pub f_hi: f64,
    #[arg(long, default_value_t = 1.0)]
    pub f_step: f64,
    /// Distances in metres.
    #[arg(long = "d", value_delimiter = ',', default_value = "1,10")]
    pub distances: Vec<f64>,
    /// Water-vapour densities in g/m^3.
    #[arg(long = "rho", value_delimiter = ',', default_value = "5")]
    pub rhos: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct WindowsArgs {
    /// Ascending row edges in metres.
    #[arg(long = "d", value_delimiter = ',', default_value = "0.3,1,2,10,11")]
    pub distances: Vec<f64>,
    /// Overrides the config's water-vapour density.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Overrides the config's beamwidth.
    #[arg(long)]
    pub beamwidth: Option<f64>,
    #[arg(long)]
    pub band_lo: Option<f64>,
    #[arg(long)]
    pub band_hi: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub clip: Option<f64>,
    #[arg(long)]
    pub min_width: Option<f64>,
}

#[derive(Debug, Args)]
pub struct MinbwArgs {
    #[arg(long, default_value_t = 10.0)]
    pub rate_gbps: f64,
    #[arg(long, default_value_t = 10.0)]
    pub bandwidth_ghz: f64,
    #[arg(long, default_value_t = 100.0)]
    pub f_lo: f64,
    #[arg(long, default_value_t = 1000.0)]
    pub f_hi: f64,
    #[arg(long, default_value_t = 10.0)]
    pub f_step: f64,
    #[arg(long = "d", value_delimiter = ',', default_value = "1,10,30")]
    pub distances: Vec<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Overrides the config's beamwidth.
    #[arg(long)]
    pub beamwidth: Option<f64>,
    /// Per-slot trace CSV; overrides the config's `trace_path`.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub bw_lo: Option<f64>,
    #[arg(long)]
    pub bw_hi: Option<f64>,
    #[arg(long)]
    pub bw_step: Option<f64>,
    #[arg(long, value_enum)]
    pub objective: Option<ObjectiveArg>,
}

/// Applies the output-directory override to relative paths.
pub fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() && !dir.is_empty() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Runs a parsed command line. Results go to `stdout` or `--out`,
/// diagnostics to `stderr`.
pub fn run(cli: &Cli, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> Result<(), CliError> {
    if cli.common.threads > 0 {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.common.threads)
            .build_global();
    }
    commands::dispatch(cli, stdout, stderr)
}
