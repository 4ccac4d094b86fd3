use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use squeeze_cli::commands::{self, Outcome, RunOptions};
use squeeze_cli::{config, CliError};

#[derive(Debug, Parser)]
#[command(
    name = "squeeze",
    version,
    about = "Squeezed-light spectra, delay scans, delay budgets and fits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Restrict spectrum and delay-scan to one demodulation frequency.
    #[arg(long = "demod-hz", global = true)]
    demod_hz: Option<f64>,
    /// Leave the generation-time comment out of SVG files.
    #[arg(long = "no-timestamp", global = true)]
    no_timestamp: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Noise vs local-oscillator phase (and optionally vs frequency).
    Spectrum,
    /// Drift-averaged noise vs excess local-oscillator fiber.
    DelayScan,
    /// Group-delay budget of both arms.
    Budget {
        /// Print the report as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Fit lineshape width and offsets to measured scans.
    Fit,
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let cfg = config::load(path)?;
    let out_dir = match (&cli.out, &cfg.config.output_dir) {
        (Some(out), _) => out.clone(),
        (None, Some(dir)) => cfg.resolve(dir),
        (None, None) => PathBuf::from("out"),
    };
    let opts = RunOptions {
        out_dir,
        demod_hz: cli.demod_hz,
        timestamp: !cli.no_timestamp,
    };
    match cli.command {
        Command::Spectrum => commands::spectrum(&cfg, &opts),
        Command::DelayScan => commands::delay_scan_cmd(&cfg, &opts),
        Command::Budget { json } => commands::budget(&cfg, &opts, json),
        Command::Fit => commands::fit(&cfg, &opts),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(outcome.summary.as_bytes());
            for f in &outcome.files {
                eprintln!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
