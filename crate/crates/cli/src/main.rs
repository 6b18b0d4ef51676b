mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] dotrank::Error),

    #[error("bad config {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Invalid(String),
}

impl CliError {
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 2: bad arguments or config, 3: bad or missing data, 4: numeric failure.
    fn exit_code(&self) -> u8 {
        use dotrank::Error as E;
        match self {
            CliError::Config { .. } | CliError::Invalid(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Core(e) => match e {
                E::Argument(_) | E::Size(_) => 2,
                E::Numeric(_) => 4,
                _ => 3,
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "dotrank", version, about = "Dot-product recommender workbench")]
struct Cli {
    /// JSON config for the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the seed in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output file, or directory for `train`.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit an iALS model and write the model, objective trace and split.
    Train,
    /// Score a trained model on held-out users.
    Eval,
    /// Run the train-recommend-observe feedback loop.
    Loop,
    /// Count representable rankings for a set of item vectors.
    Nrank,
    /// Popularity-cone membership and spherical-cap ratios.
    Cones,
}

pub struct Globals {
    pub config: PathBuf,
    pub seed: Option<u64>,
    pub output: PathBuf,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Invalid("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Invalid(e.to_string()))?;
    }
    let g = Globals {
        config: cli.config.ok_or_else(|| CliError::Invalid("--config is required".into()))?,
        seed: cli.seed,
        output: cli.output.ok_or_else(|| CliError::Invalid("--output is required".into()))?,
    };
    match cli.command {
        Command::Train => commands::train(&g),
        Command::Eval => commands::eval(&g),
        Command::Loop => commands::feedback_loop(&g),
        Command::Nrank => commands::nrank(&g),
        Command::Cones => commands::cones(&g),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
