//! Command-line driver for spatial-qudit state tomography: constructs and
//! certifies mutually unbiased basis families, simulates projection counts
//! with optional Poisson noise, reconstructs density operators, samples
//! interference patterns, and reports fidelities with bootstrap error bars.

mod commands;
mod config;

use clap::{Parser, Subcommand, ValueEnum};
use config::FamilySource;
use std::path::PathBuf;

const SEED_SCHEME: &str = "\
Determinism: a config file plus one master seed (--seed, else the config's \
noise seed, else 0) fixes every output byte. Counting noise draws from \
sub-seed stream 1; bootstrap resampling draws from stream 2 with one \
sub-seed per trial. Floats are written with 17 significant digits.

Exit codes: 0 success, 2 configuration error, 3 certification failure, \
4 numerical failure.";

#[derive(Parser)]
#[command(name = "mubtomo", version, about, after_long_help = SEED_SCHEME)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SourceFlag {
    /// Quadratic-phase construction for odd prime dimensions.
    Prime,
    /// Embedded dimension-8 unitary tables.
    Tables,
}

impl From<SourceFlag> for FamilySource {
    fn from(flag: SourceFlag) -> Self {
        match flag {
            SourceFlag::Prime => FamilySource::PrimeFormula,
            SourceFlag::Tables => FamilySource::Dim8Tables,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Construct a basis family, certify it, and export it.
    Mub {
        /// Qudit dimension (falls back to the config's `dim`).
        #[arg(long)]
        dim: Option<usize>,
        /// Family construction; chosen automatically by dimension if absent.
        #[arg(long, value_enum)]
        source: Option<SourceFlag>,
        /// Experiment config JSON (optional for this command).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate projection counts for the configured experiment.
    Simulate {
        /// Experiment config JSON.
        #[arg(long)]
        config: PathBuf,
        /// Master seed, overriding the config's noise seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory, overriding the config's `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Family construction; chosen automatically by dimension if absent.
        #[arg(long, value_enum)]
        source: Option<SourceFlag>,
    },
    /// Reconstruct a density operator from a counts file.
    Reconstruct {
        #[arg(long)]
        config: PathBuf,
        /// Counts JSON written by `simulate`.
        #[arg(long)]
        counts: PathBuf,
        /// Bootstrap trials for the fidelity error bar (min 100).
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        source: Option<SourceFlag>,
    },
    /// Sample the far-field interference pattern of the configured beam.
    Pattern {
        #[arg(long)]
        config: PathBuf,
        /// Analyze for this basis (0 = slit basis); unmodulated if absent.
        #[arg(long)]
        alpha: Option<usize>,
        /// Vector index within the analysis basis.
        #[arg(long, default_value_t = 0)]
        m: usize,
        /// Left edge in meters (defaults to the mirror of the right edge).
        #[arg(long)]
        x_min: Option<f64>,
        /// Right edge in meters (defaults to the envelope's first zero).
        #[arg(long)]
        x_max: Option<f64>,
        /// Number of samples.
        #[arg(long, default_value_t = 2001)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        source: Option<SourceFlag>,
    },
    /// Report fidelity between a counts file and the expected state.
    Fidelity {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        counts: PathBuf,
        /// Bootstrap trials for the error bar (min 100).
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        source: Option<SourceFlag>,
    },
}

/// Failure with the exit code it maps to.
pub struct CliError {
    code: i32,
    message: String,
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        CliError::new(2, message)
    }

    pub fn certification(message: impl Into<String>) -> Self {
        CliError::new(3, message)
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        CliError::new(4, message)
    }
}

impl From<mubtomo::Error> for CliError {
    fn from(err: mubtomo::Error) -> Self {
        use mubtomo::Error::*;
        let code = match err {
            ZeroTransmission | EmptyRange | EmptyCountRow { .. } | DegenerateSpectrum => 4,
            _ => 2,
        };
        CliError::new(code, err.to_string())
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Mub {
            dim,
            source,
            config,
            out,
        } => {
            let loaded = config.as_deref().map(config::load).transpose()?;
            let dim = dim.or(loaded.as_ref().map(|c| c.dim)).ok_or_else(|| {
                CliError::config("pass --dim or a --config that sets `dim`")
            })?;
            let source = source
                .map(FamilySource::from)
                .or(loaded.as_ref().and_then(|c| c.family_source));
            let out = out
                .or(loaded.as_ref().and_then(|c| c.output_dir.clone()))
                .unwrap_or_else(|| PathBuf::from("."));
            commands::mub(dim, source, &out)
        }
        Command::Simulate {
            config,
            seed,
            out,
            source,
        } => {
            let loaded = config::load(&config)?;
            commands::simulate(&loaded, seed, out.as_deref(), source.map(Into::into))
        }
        Command::Reconstruct {
            config,
            counts,
            trials,
            seed,
            out,
            source,
        } => {
            let loaded = config::load(&config)?;
            commands::reconstruct_cmd(
                &loaded,
                &counts,
                trials,
                seed,
                out.as_deref(),
                source.map(Into::into),
            )
        }
        Command::Pattern {
            config,
            alpha,
            m,
            x_min,
            x_max,
            points,
            out,
            source,
        } => {
            let loaded = config::load(&config)?;
            commands::pattern_cmd(
                &loaded,
                alpha,
                m,
                x_min,
                x_max,
                points,
                out.as_deref(),
                source.map(Into::into),
            )
        }
        Command::Fidelity {
            config,
            counts,
            trials,
            seed,
            out,
            source,
        } => {
            let loaded = config::load(&config)?;
            commands::fidelity_cmd(
                &loaded,
                &counts,
                trials,
                seed,
                out.as_deref(),
                source.map(Into::into),
            )
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {}", err.message);
        std::process::exit(err.code);
    }
}
