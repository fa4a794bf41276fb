//! `signflip`: command-line front end for the modal analysis library.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use signflip::regime::CaseLabel;

use crate::commands::Context;
use crate::error::CliError;
use crate::output::{Emit, Writer};

#[derive(Parser)]
#[command(name = "signflip", version, about = "Modal analysis of sign-changing transmission problems")]
struct Cli {
    /// Falls back to the `command` key of the configuration.
    #[command(subcommand)]
    command: Option<Command>,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Inclusive mode range `a..b`.
    #[arg(long, global = true)]
    modes: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Emit::Both)]
    emit: Emit,
    /// standard, critical or supercritical.
    #[arg(long, global = true)]
    force_case: Option<String>,
}

#[derive(Subcommand, Clone, Copy, ValueEnum)]
enum Command {
    /// Log-log slopes of the inverse mode matrices (disk or ball).
    Slopes,
    /// Order of regularity lost and kernel description.
    Classify,
    /// Kernel modes of a waveguide.
    KernelScan,
    /// Planar determinant against its large-radius limit.
    Curvature,
    /// Field values on a grid.
    Field,
    /// Special-function table.
    Special,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Ok(threads) = std::env::var("SIGNFLIP_THREADS") {
        let n: usize = threads
            .parse()
            .map_err(|_| CliError::Config(format!("SIGNFLIP_THREADS must be a positive integer, got '{threads}'")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let config = config::load(path)?;
    let modes = cli
        .modes
        .as_deref()
        .or(config.modes.as_deref())
        .map(config::parse_modes)
        .transpose()?;
    let forced = cli.force_case.as_deref().map(str::parse::<CaseLabel>).transpose()?;
    let ctx = Context {
        config,
        modes,
        forced,
        writer: Writer::new(&cli.out, cli.emit)?,
    };
    let command = match (cli.command, ctx.config.command.as_deref()) {
        (Some(c), _) => c,
        (None, Some(name)) => Command::from_str(name, true)
            .map_err(|_| CliError::Config(format!("unknown command '{name}'")))?,
        (None, None) => return Err(CliError::Config("no command given".into())),
    };
    match command {
        Command::Slopes => commands::slopes(&ctx),
        Command::Classify => commands::classify(&ctx),
        Command::KernelScan => commands::kernel_scan(&ctx),
        Command::Curvature => commands::curvature(&ctx),
        Command::Field => commands::field(&ctx),
        Command::Special => commands::special(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("signflip: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
