use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use heraldsim::commands::{cmd_analyze, cmd_run, cmd_video};
use heraldsim::config::{parse_config, reference_text, RunConfig};
use heraldsim::error::CliError;
use heraldsim::selftest;

/// Heralded and ghost double-slit simulator.
///
/// Exit status: 0 success, 1 selftest failure, 2 config error, 3 physics
/// error, 4 I/O or file-format error.
#[derive(Debug, Parser)]
#[command(name = "heraldsim", version)]
struct Cli {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed; overrides `seed` in the config file.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Output directory; overrides `out_dir` in the config file.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Probability maps, profiles, an event stream and a summary.
    Run,
    /// Exponential-ramp frame sequence as 16-bit PGM.
    Video,
    /// Fringe period, visibility, width and bands of a profile CSV or PGM.
    Analyze { path: PathBuf },
    /// Fast oracle checks.
    Selftest,
    /// Every config key with its default and provenance.
    ConfigReference,
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.to_string_lossy().into_owned();
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::ConfigReference => print!("{}", reference_text()),
        Command::Selftest => {
            let failures = selftest::run_all(std::io::stdout());
            if failures > 0 {
                eprintln!("{failures} check(s) failed");
                return Ok(1);
            }
        }
        Command::Run => {
            let out = cmd_run(&load(cli)?)?;
            println!("wrote {}", out.display());
        }
        Command::Video => {
            let out = cmd_video(&load(cli)?)?;
            println!("wrote {}", out.display());
        }
        Command::Analyze { path } => {
            for (k, v) in cmd_analyze(&load(cli)?, path)? {
                println!("{k} = {v}");
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("heraldsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
