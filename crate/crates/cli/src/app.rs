//! Argument parsing and exit codes. The `slopehop` binary is a thin wrapper around [`run`].

use clap::{Parser, Subcommand};
use std::ffi::OsString;
use std::path::PathBuf;

use crate::commands::{cmd_reproduce, cmd_run, cmd_sweep, Axis};
use crate::error::CliError;

/// Deterministic simulator of a two-mass spring hopper on a slope.
#[derive(Parser)]
#[command(name = "slopehop", version)]
struct Cli {
    /// Accepted for scripts. Every run is deterministic.
    #[arg(long, global = true)]
    seedless: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the three built-in stages and write the comparison table.
    Reproduce {
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a grid of scenarios varying numeric keys.
    Sweep {
        config: PathBuf,
        /// field:min:max:count, repeatable.
        #[arg(long = "axis", required = true)]
        axes: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let manifest = match cli.command {
        Command::Run { config, out } => cmd_run(&config, &out)?,
        Command::Reproduce { out } => cmd_reproduce(&out)?,
        Command::Sweep { config, axes, out } => {
            let axes = axes
                .iter()
                .map(|a| a.parse())
                .collect::<Result<Vec<Axis>, _>>()?;
            cmd_sweep(&config, &axes, &out)?
        }
    };
    println!(
        "{} {} ({:.2} s)",
        manifest.scenario_id, manifest.config_digest, manifest.wall_time_s
    );
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the process exit code:
/// 0 success, 1 i/o failure, 2 bad arguments or configuration, 3 numerical abort.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("slopehop: {e}");
            e.exit_code()
        }
    }
}
