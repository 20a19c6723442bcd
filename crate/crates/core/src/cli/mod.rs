//! Command-line front end: configuration, orchestration and CSV/JSON output.
//!
//! Exit codes: 0 success, 1 a comparison gate failed, 2 configuration error,
//! 3 simulation failure, 4 pipeline error. Worker threads come from the
//! `RISCOV_THREADS` environment variable; `NO_COLOR` disables coloured
//! pass/fail markers.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::montecarlo::{Alignment, PathBMode, Quantity};

pub use commands::{
    run_analytic, run_compare, run_hist, run_simulate, run_sweep, CompareOutput, CompareReport,
    GateCheck, HistogramOutput, SimulateOutput, SweepAxis, SweepOptions,
};
pub use config::{db_to_linear, Gate, GateKind, NetworkConfig, PER_KM2};
pub use output::{csv_string, write_csv, ResultRow, CSV_HEADER};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("simulation failed: {0}")]
    Simulation(String),
    #[error("pipeline error: {0}")]
    Pipeline(String),
    #[error("gate failed: {0}")]
    GateFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::GateFailed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Simulation(_) => 3,
            CliError::Pipeline(_) => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "riscov", version, about = "Coverage of RIS-assisted mmWave networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// TOML (or .json) configuration; built-in defaults if absent.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory; CSV goes to stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<u64>,
    /// Whether path-B statistics condition on an engaged RIS.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// How the serving beam alignment towards the RIS is drawn.
    #[arg(long, value_enum)]
    pub orientation: Option<OrientationArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Conditional,
    Unconditional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrientationArg {
    Thinning,
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    #[value(name = "lambda_ris")]
    LambdaRis,
    #[value(name = "lambda_bs")]
    LambdaBs,
    #[value(name = "N")]
    N,
    #[value(name = "M")]
    M,
    #[value(name = "T")]
    T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QuantityArg {
    R0,
    R1,
    R2,
    #[value(name = "p_ris")]
    PRis,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form coverage at every configured threshold.
    Analytic(Common),
    /// Monte Carlo coverage with confidence intervals.
    Simulate(Common),
    /// Analytic against Monte Carlo with pass/fail gates.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Separate configuration for the analytic engines.
        #[arg(long)]
        analytic_config: Option<PathBuf>,
    },
    /// Evaluate the engines over a grid of one parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        axis: AxisArg,
        /// Comma-separated, strictly increasing values (densities per km², T in dB).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        grid: Vec<f64>,
        /// Comma-separated metric names to keep.
        #[arg(long, value_delimiter = ',')]
        metric: Vec<String>,
        /// Also simulate every grid point.
        #[arg(long)]
        with_mc: bool,
    },
    /// Empirical histogram of a distance or power with its analytic density.
    Hist {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "r1")]
        quantity: QuantityArg,
        #[arg(long)]
        bins: Option<usize>,
    },
}

fn load_config(common: &Common) -> Result<NetworkConfig, CliError> {
    let mut cfg = match &common.config {
        Some(p) => NetworkConfig::load(p)?,
        None => NetworkConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.master_seed = s;
    }
    if let Some(n) = common.trials {
        cfg.n_trials = n;
    }
    if let Some(m) = common.mode {
        cfg.modes.path_b = match m {
            ModeArg::Conditional => PathBMode::Conditional,
            ModeArg::Unconditional => PathBMode::Unconditional,
        };
    }
    if let Some(o) = common.orientation {
        cfg.modes.alignment = match o {
            OrientationArg::Thinning => Alignment::Thinning,
            OrientationArg::Explicit => Alignment::Explicit,
        };
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .and_then(|_| std::fs::write(dir.join(name), bytes))
        .map_err(|e| CliError::Pipeline(format!("writing {}: {e}", dir.join(name).display())))
}

fn emit_rows(out: Option<&Path>, name: &str, rows: &[ResultRow]) -> Result<(), CliError> {
    let text = csv_string(rows)?;
    match out {
        Some(dir) => write_file(dir, name, text.as_bytes()),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Pipeline(format!("writing stdout: {e}"))),
    }
}

fn emit_histogram(out: Option<&Path>, h: &HistogramOutput) -> Result<(), CliError> {
    let name = format!("hist_{}.csv", h.quantity.name());
    match out {
        Some(dir) => write_file(dir, &name, h.csv().as_bytes()),
        None => std::io::stdout()
            .write_all(h.csv().as_bytes())
            .map_err(|e| CliError::Pipeline(format!("writing stdout: {e}"))),
    }
}

fn colour() -> bool {
    std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty()) && std::io::stderr().is_terminal()
}

fn marker(pass: bool) -> &'static str {
    match (pass, colour()) {
        (true, true) => "\x1b[32mPASS\x1b[0m",
        (false, true) => "\x1b[31mFAIL\x1b[0m",
        (true, false) => "PASS",
        (false, false) => "FAIL",
    }
}

fn quantity(q: QuantityArg) -> Quantity {
    match q {
        QuantityArg::R0 => Quantity::R0,
        QuantityArg::R1 => Quantity::R1,
        QuantityArg::R2 => Quantity::R2,
        QuantityArg::PRis => Quantity::PRis,
    }
}

fn axis(a: AxisArg) -> SweepAxis {
    match a {
        AxisArg::LambdaRis => SweepAxis::LambdaRis,
        AxisArg::LambdaBs => SweepAxis::LambdaBs,
        AxisArg::N => SweepAxis::N,
        AxisArg::M => SweepAxis::M,
        AxisArg::T => SweepAxis::T,
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analytic(common) => {
            let cfg = load_config(&common)?;
            emit_rows(common.out.as_deref(), "analytic.csv", &run_analytic(&cfg)?)
        }
        Command::Simulate(common) => {
            let cfg = load_config(&common)?;
            let sim = run_simulate(&cfg, None)?;
            emit_rows(common.out.as_deref(), "simulate.csv", &sim.rows)?;
            for h in &sim.histograms {
                emit_histogram(common.out.as_deref(), h)?;
            }
            Ok(())
        }
        Command::Compare {
            common,
            analytic_config,
        } => {
            let cfg = load_config(&common)?;
            let acfg = analytic_config.as_deref().map(NetworkConfig::load).transpose()?;
            let cmp = run_compare(&cfg, acfg.as_ref(), None)?;
            emit_rows(common.out.as_deref(), "compare.csv", &cmp.rows)?;
            let json = serde_json::to_string_pretty(&cmp.report)
                .map_err(|e| CliError::Pipeline(format!("encoding report: {e}")))?;
            if let Some(dir) = common.out.as_deref() {
                write_file(dir, "compare.json", json.as_bytes())?;
            }
            for c in &cmp.report.checks {
                eprintln!(
                    "{} {:<12} {:<8} T={:>6} dB  ref={:.4} mc={:.4} gap={:+.4} tol={}",
                    marker(c.pass),
                    c.engine,
                    c.metric.name(),
                    c.t_db,
                    c.reference,
                    c.mc,
                    c.gap,
                    c.tolerance
                );
            }
            let failed = cmp.report.checks.iter().filter(|c| !c.pass).count();
            if failed > 0 {
                return Err(CliError::GateFailed(format!(
                    "{failed} of {} checks failed",
                    cmp.report.checks.len()
                )));
            }
            Ok(())
        }
        Command::Sweep {
            common,
            axis: a,
            grid,
            metric,
            with_mc,
        } => {
            let cfg = load_config(&common)?;
            let options = SweepOptions {
                metrics: metric,
                with_mc,
            };
            let rows = run_sweep(&cfg, axis(a), &grid, &options, None)?;
            emit_rows(common.out.as_deref(), "sweep.csv", &rows)
        }
        Command::Hist {
            common,
            quantity: q,
            bins,
        } => {
            let cfg = load_config(&common)?;
            let h = run_hist(&cfg, quantity(q), bins.unwrap_or(cfg.histograms.bins), None)?;
            if let Some(l1) = h.l1() {
                eprintln!("{}: L1 to analytic density = {l1:.4}", h.quantity.name());
            }
            emit_histogram(common.out.as_deref(), &h)
        }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("riscov: {e}");
            e.exit_code()
        }
    }
}
