//! `quasihopf`: drive the numerical laboratory from the shell.
//!
//! Subcommands cover single trajectories, spectral classification,
//! pullback boundary grids, shift sweeps, pair-separation experiments,
//! angular densities, and the bundled figure set. Outputs are CSV (12
//! significant digits, '#'-prefixed provenance line) and direct SVG.

use clap::error::ErrorKind;
use clap::Parser;
use std::process::ExitCode;

mod commands;
mod emit;
mod fail;

#[derive(Parser)]
#[command(name = "quasihopf", version, about = "Pullback attractors, spectra, and chaos diagnostics for a driven planar family", propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: commands::Command,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let wants_exit_zero =
                matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if wants_exit_zero { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    match cli.command.run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
