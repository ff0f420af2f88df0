mod check;
mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use floatbody::Error;

#[derive(Parser, Debug)]
#[command(name = "floatctl", version, about = "Spectra, simulation and control of a floating object in a wave tank")]
pub struct Cli {
    /// Config file (TOML), or the literal CFG0 for the built-in reference case.
    #[arg(long, global = true, default_value = "CFG0")]
    pub config: String,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Cells on the left exterior side (overrides the config file).
    #[arg(long, global = true)]
    pub cells: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Eigenfrequencies, gaps and resonance diagnostics.
    Spectrum(SpectrumArgs),
    /// Normalized eigenvectors and their input authority.
    Modes(ModesArgs),
    /// Open-loop simulation (linear, or nonlinear with --nonlinear).
    Simulate(SimulateArgs),
    /// Steer the rest state to a target at time tau.
    Steer(SteerArgs),
    /// Closed-loop run with u = -B*z and decay-rate fit.
    Stabilize(StabilizeArgs),
    /// Run the invariant suite on a config.
    Check(CheckArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, serde::Serialize)]
pub enum BranchArg {
    General,
    Symmetric,
}

impl From<BranchArg> for floatbody::spectral::Branch {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::General => Self::General,
            BranchArg::Symmetric => Self::Symmetric,
        }
    }
}

#[derive(Args, Debug, serde::Serialize)]
pub struct SpectrumArgs {
    #[arg(long, default_value_t = 30)]
    pub count: usize,
    #[arg(long, value_enum, default_value = "symmetric")]
    pub branch: BranchArg,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct ModesArgs {
    #[arg(long, default_value_t = 8)]
    pub count: usize,
    #[arg(long, value_enum, default_value = "symmetric")]
    pub branch: BranchArg,
    /// Also write each mode's real and imaginary grid states.
    #[arg(long)]
    pub states: bool,
}

/// Initial-state selection shared by simulate and stabilize.
#[derive(Args, Debug, serde::Serialize)]
pub struct InitialArgs {
    /// Initial state CSV; defaults to rest unless --init-modes is given.
    #[arg(long)]
    pub initial: Option<PathBuf>,
    /// Comma-separated 1-based symmetric mode indices; the initial state is
    /// the sum of their real parts.
    #[arg(long, value_delimiter = ',')]
    pub init_modes: Vec<usize>,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub init: InitialArgs,
    /// Control CSV (t,u); zero input if omitted.
    #[arg(long)]
    pub control: Option<PathBuf>,
    /// Final time in seconds; defaults to the minimal control horizon.
    #[arg(long)]
    pub t_final: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Write a state snapshot every N steps (0: endpoints only).
    #[arg(long, default_value_t = 0)]
    pub snapshot_every: usize,
    /// Use the nonlinear finite-volume solver.
    #[arg(long)]
    pub nonlinear: bool,
    /// Courant number of the nonlinear solver.
    #[arg(long, default_value_t = floatbody::nonlinear_sim::CFL_NUMBER)]
    pub cfl: f64,
    /// Shock indicator limit of the nonlinear solver.
    #[arg(long, default_value_t = floatbody::nonlinear_sim::SHOCK_RATIO)]
    pub tol_shock: f64,
    /// Also write the interior pressure at the final time (nonlinear only).
    #[arg(long)]
    pub pressure: bool,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct SteerArgs {
    /// Target state CSV.
    #[arg(long, conflicts_with = "target_mode")]
    pub target: Option<PathBuf>,
    /// Use the real part of this 1-based symmetric mode as the target.
    #[arg(long, default_value_t = 1)]
    pub target_mode: usize,
    /// Horizon in seconds; defaults to 1.5 times the minimal horizon.
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, default_value_t = floatbody::control::DEFAULT_MODES)]
    pub modes: usize,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Gram condition-number limit.
    #[arg(long, default_value_t = floatbody::control::DEFAULT_COND_LIMIT)]
    pub tol_cond: f64,
    /// Relative trace mismatch allowed by the target smoothness check.
    #[arg(long, default_value_t = 0.05)]
    pub tol_trace: f64,
    /// Relative neighbour jump allowed by the target smoothness check.
    #[arg(long, default_value_t = 0.25)]
    pub tol_smooth: f64,
    /// Skip the grid verification run.
    #[arg(long)]
    pub no_verify: bool,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct StabilizeArgs {
    #[command(flatten)]
    pub init: InitialArgs,
    /// Final time in seconds; defaults to 50 minimal horizons.
    #[arg(long)]
    pub t_final: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Keep every N-th norm sample in the CSV.
    #[arg(long, default_value_t = 100)]
    pub record_every: usize,
    /// Accept initial states with an antisymmetric part.
    #[arg(long)]
    pub allow_asymmetric: bool,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct CheckArgs {
    /// Number of roots checked.
    #[arg(long, default_value_t = 30)]
    pub count: usize,
    /// Relative skew-symmetry tolerance.
    #[arg(long, default_value_t = 1e-12)]
    pub tol_skew: f64,
    /// Gram-matrix deviation tolerance.
    #[arg(long, default_value_t = 1e-6)]
    pub tol_ortho: f64,
    /// Norm-conservation tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol_energy: f64,
}

/// Failure classes with their exit codes.
#[derive(Debug)]
pub enum CliError {
    Lib(Error),
    Input(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_config() => 2,
            CliError::Lib(_) => 3,
            CliError::Input(_) => 2,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            CliError::Lib(e) => {
                serde_json::json!({"error": e.kind(), "message": e.to_string(), "exit_code": self.exit_code()})
            }
            CliError::Input(m) => {
                serde_json::json!({"error": "input", "message": m, "exit_code": self.exit_code()})
            }
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Ok(n) = std::env::var("FLOATCTL_THREADS") {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => log::warn!("ignoring FLOATCTL_THREADS={n}"),
        }
    }
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
