//! Experiment orchestration for the rotating compressible-flow laboratory:
//! per-mode linear diagnostics, dispersive measurements, nonlinear runs,
//! norm suites, and the rotation/Mach regime sweep.

mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand};
use config::ExperimentConfig;
use std::path::PathBuf;
use std::process::ExitCode;

/// Exit codes: 0 success, 2 validation failure, 3 runtime instability
/// (partial artifacts are kept), 4 I/O failure.
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_UNSTABLE: u8 = 3;
pub const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(
    name = "nsclab",
    about = "Pseudospectral laboratory for the 3D rotating compressible Navier-Stokes system",
    version
)]
struct Cli {
    /// TOML config file; command-line flags override its keys
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

/// Config keys exposed as flags (a subset; the config file covers the rest).
#[derive(clap::Args, Debug, Default)]
struct Overrides {
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    box_length: Option<f64>,
    #[arg(long, global = true)]
    mu: Option<f64>,
    #[arg(long, global = true)]
    omega: Option<f64>,
    #[arg(long, global = true)]
    eps: Option<f64>,
    #[arg(long, global = true)]
    gamma: Option<f64>,
    #[arg(long, global = true)]
    q: Option<f64>,
    #[arg(long, global = true)]
    r: Option<f64>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    beta0: Option<f64>,
    #[arg(long, global = true)]
    recipe: Option<String>,
    #[arg(long, global = true)]
    amplitude: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    horizon: Option<f64>,
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[arg(long, global = true)]
    cadence: Option<usize>,
    #[arg(long, global = true)]
    scheme: Option<usize>,
    #[arg(long, global = true)]
    band: Option<i32>,
    #[arg(long, global = true)]
    outdir: Option<String>,
    #[arg(long, global = true)]
    oversample: Option<bool>,
}

#[derive(Subcommand)]
enum Command {
    /// Quartic/eigenvalue agreement and dissipativity over random draws
    Symbol,
    /// Guaranteed-rate decay verification over sampled modes (CSV report)
    LinearDecay,
    /// Dispersive space-time measurement with rotation-speed doubling
    Strichartz,
    /// Nonlinear run: snapshots, manifest, and run report
    Simulate,
    /// Energy/auxiliary norm suite and data functionals of a run
    Norms,
    /// Master-inequality diagnostics along a time ladder
    Apriori,
    /// (Omega, eps) regime sweep with stability map
    Sweep,
    /// Reduced property suites across every subsystem
    VerifyAll,
}

fn apply_overrides(cfg: &mut ExperimentConfig, o: &Overrides) {
    macro_rules! set {
        ($($field:ident),*) => {
            $(if let Some(v) = &o.$field { cfg.$field = v.clone(); })*
        };
    }
    set!(
        n, box_length, mu, omega, eps, gamma, q, r, alpha, beta0, recipe, amplitude, seed,
        horizon, dt, cadence, scheme, band, outdir, oversample
    );
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => match ExperimentConfig::load(path) {
            Ok(c) => c,
            Err(msg) => {
                eprintln!("config error: {msg}");
                return ExitCode::from(EXIT_VALIDATION);
            }
        },
        None => ExperimentConfig::default(),
    };
    apply_overrides(&mut cfg, &cli.overrides);

    let result = match cli.command {
        Command::Symbol => commands::symbol::run(&cfg),
        Command::LinearDecay => commands::linear_decay::run(&cfg),
        Command::Strichartz => commands::strichartz::run(&cfg),
        Command::Simulate => commands::simulate::run(&cfg),
        Command::Norms => commands::norms::run(&cfg),
        Command::Apriori => commands::apriori::run(&cfg),
        Command::Sweep => commands::sweep::run(&cfg),
        Command::VerifyAll => commands::verify_all::run(&cfg),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Command-level error carrying its process exit code.
#[derive(Debug)]
pub struct CmdError {
    message: String,
    code: u8,
}

impl CmdError {
    pub fn validation(msg: impl Into<String>) -> Self {
        Self {
            message: msg.into(),
            code: EXIT_VALIDATION,
        }
    }
    pub fn unstable(msg: impl Into<String>) -> Self {
        Self {
            message: msg.into(),
            code: EXIT_UNSTABLE,
        }
    }
    pub fn io(msg: impl Into<String>) -> Self {
        Self {
            message: msg.into(),
            code: EXIT_IO,
        }
    }
    pub fn exit_code(&self) -> u8 {
        self.code
    }
}

impl std::fmt::Display for CmdError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl From<nsclab_core::Error> for CmdError {
    fn from(e: nsclab_core::Error) -> Self {
        use nsclab_core::Error as E;
        match &e {
            E::Io(_) | E::MalformedSnapshot(_) => CmdError::io(e.to_string()),
            E::Unstable { .. } | E::PositivityViolation { .. } | E::NonFinite(_) => {
                CmdError::unstable(e.to_string())
            }
            _ => CmdError::validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError::io(e.to_string())
    }
}
