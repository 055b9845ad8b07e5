//! Command-line front end for the Gaussian-channel toolkit: channel file
//! I/O, verdict reports and batch evolution of generators.
//!
//! Exit codes: 0 = verdict computed and positive where applicable,
//! 1 = negative verdict or domain error, 2 = parse/IO error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gausschan::Tolerance;

mod commands;
mod format;
mod report;

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Io(String),
    Domain(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) | CliError::Io(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
            CliError::Domain(m) => write!(f, "error: {m}"),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "gausschan",
    version,
    about = "Decide and construct semigroup properties of bosonic Gaussian channels (X, Y)"
)]
struct Cli {
    /// Tolerance knob for every verdict (sets both the absolute and the
    /// relative epsilon). Overrides the GAUSSCHAN_TOL environment variable;
    /// default 1e-9.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Print the machine-readable JSON report instead of the human one.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a channel file: complete positivity and reversibility.
    Check { path: PathBuf },
    /// Compose two channels (Heisenberg order: the signal passes through
    /// the second operand first) and write the product.
    Compose {
        path1: PathBuf,
        path2: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Aggregate classification: reversibility, idempotency with normal
    /// form, gauge-covariant case, determinant sign, embeddability.
    Classify { path: PathBuf },
    /// Split a non-reversible channel into two non-reversible factors.
    Divide {
        path: PathBuf,
        /// Fixed class-scaling parameter in (0, 1) instead of the downward
        /// search 1/2, 1/4, ...
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        out_left: PathBuf,
        #[arg(long)]
        out_right: PathBuf,
    },
    /// Evolve a generator file at the given times and analyze the
    /// semigroup: simple form, bounded noise, invariant state, Lindblad
    /// coefficients.
    Semigroup {
        path: PathBuf,
        /// Comma-separated list of times.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        t: Vec<f64>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// One-parameter semigroup membership of the X part; for reversible
    /// channels also the exp(sp) criterion and the two-factor splitting.
    EmbedCheck { path: PathBuf },
}

fn resolve_tolerance(flag: Option<f64>) -> Result<Tolerance, CliError> {
    let eps = match flag {
        Some(e) => e,
        None => match std::env::var("GAUSSCHAN_TOL") {
            Ok(text) => text
                .trim()
                .parse::<f64>()
                .map_err(|_| CliError::Parse(format!("GAUSSCHAN_TOL is not a number: {text:?}")))?,
            Err(_) => return Ok(Tolerance::default()),
        },
    };
    Tolerance::uniform(eps).map_err(|_| {
        CliError::Parse(format!("tolerance must be a finite nonnegative number, got {eps}"))
    })
}

fn run() -> Result<i32, CliError> {
    let cli = Cli::parse();
    let tol = resolve_tolerance(cli.tol)?;
    match &cli.command {
        Command::Check { path } => commands::cmd_check(path, tol, cli.json),
        Command::Compose { path1, path2, out } => {
            commands::cmd_compose(path1, path2, out, tol, cli.json)
        }
        Command::Classify { path } => commands::cmd_classify(path, tol, cli.json),
        Command::Divide { path, epsilon, out_left, out_right } => {
            commands::cmd_divide(path, *epsilon, out_left, out_right, tol, cli.json)
        }
        Command::Semigroup { path, t, out_dir } => {
            commands::cmd_semigroup(path, t, out_dir, tol, cli.json)
        }
        Command::EmbedCheck { path } => commands::cmd_embed_check(path, tol, cli.json),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
