use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use reap_cli::commands;
use reap_cli::config::ExperimentConfig;
use reap_cli::error::CliError;
use reap_cli::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Parser)]
#[command(name = "reap", about = "Privacy-contract design and simulation experiments")]
struct Cli {
    /// Experiment configuration file (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Random seed override.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    /// Output directory for artifacts.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Format of the summary printed to stdout.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: FormatArg,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configured instance and write the menu.
    Design,
    /// Check a menu (or the freshly solved one) against all constraints.
    Verify {
        /// Previously written menu document to check.
        #[arg(long, value_name = "PATH")]
        menu: Option<PathBuf>,
    },
    /// Run Monte Carlo sensing rounds against the designed menu.
    Simulate,
    /// Run the sweep described by the configuration.
    Sweep,
    /// Reproduce a canned experiment (fig2..fig6).
    Figure {
        /// Figure identifier.
        id: String,
    },
}

fn load_config(cli: &Cli) -> Result<Option<ExperimentConfig>, CliError> {
    let Some(path) = &cli.config else {
        return Ok(None);
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("read {}: {e}", path.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(Some(cfg))
}

fn require_config(cfg: &Option<ExperimentConfig>) -> Result<&ExperimentConfig, CliError> {
    cfg.as_ref()
        .ok_or_else(|| CliError::Validation("this command requires --config".into()))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = load_config(cli)?;
    let out_dir = cli
        .out
        .clone()
        .or_else(|| cfg.as_ref().and_then(|c| c.output.clone()))
        .unwrap_or_else(|| PathBuf::from("."));
    let format: Format = cli.format.into();
    match &cli.command {
        Command::Design => commands::design::run(require_config(&cfg)?, &out_dir, format),
        Command::Verify { menu } => {
            commands::verify::run(cfg.as_ref(), menu.as_deref(), &out_dir, format)
        }
        Command::Simulate => {
            let cfg = require_config(&cfg)?;
            commands::simulate::run(cfg, cfg.seed, &out_dir, format)
        }
        Command::Sweep => commands::sweep::run(require_config(&cfg)?, &out_dir, format),
        Command::Figure { id } => commands::figure::run(id, &out_dir, format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
