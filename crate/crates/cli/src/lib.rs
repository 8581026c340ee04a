//! Command-line experiments on resonance functionals.
//!
//! A scenario file names a resonance pole, quadrature settings, a time grid
//! and a set of observables and states. The commands are
//!
//! * `decay` – CSV of the Gamow functional paired with an observable over time,
//!   next to the closed form `e^{−Γt}(ρ_D|O)`;
//! * `moments` – `(ρ|Hⁿ)` for `n = 0..5`, for the Gamow functional and a reference state;
//! * `audit` – JSON positivity reports `(ρ|O†O)` over random observables;
//! * `pair` – a single pairing `(ρ|O)` by name.
//!
//! Exit codes: `0` success, `1` a tolerance check failed, `2` the scenario
//! or a name is invalid, `3` a numeric guard tripped (overflowing
//! exponential or unsupported polynomial degree).

pub mod commands;
pub mod scenario;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{run, Outcome};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric guard: {0}")]
    Numeric(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl From<gamow_core::Error> for CliError {
    fn from(e: gamow_core::Error) -> Self {
        match e {
            gamow_core::Error::Range(_) | gamow_core::Error::UnsupportedDegree { .. } => {
                CliError::Numeric(e.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "gamow",
    version,
    about = "Resonance decay experiments over a continuous spectrum"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Pass/fail tolerance, scaled by `1 + |reference|`.
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    /// Overrides the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gamow-functional decay scan over the scenario time grid.
    Decay(Common),
    /// Energy moments (ρ|Hⁿ), n = 0..5.
    Moments(Common),
    /// Positivity audits (ρ|O†O) over random observables.
    Audit(Common),
    /// Pair one named state with one named observable.
    Pair {
        #[command(flatten)]
        common: Common,
        state: String,
        observable: String,
    },
}
