//! `adiabatic-probe`: fidelity traces, parameter sweeps and adiabaticity
//! reports for a spin-1/2 in a rotating rf field.

mod commands;
mod output;
mod params;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{ConditionsArgs, SliceArgs, SweepArgs, TraceArgs, ValidateArgs};

#[derive(Debug, Parser)]
#[command(name = "adiabatic-probe", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fidelity against the instantaneous eigenstate over time
    Trace(TraceArgs),
    /// Closed-form quantities over a (K, R) grid
    Sweep(SweepArgs),
    /// Minimum fidelity and its time along one axis
    Slice(SliceArgs),
    /// Adiabaticity conditions at one parameter point, as JSON
    Conditions(ConditionsArgs),
    /// Cross-checks between the closed forms and the numerical routes
    Validate(ValidateArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Trace(a) => commands::trace(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Slice(a) => commands::slice(a),
        Command::Conditions(a) => commands::conditions(a),
        Command::Validate(a) => commands::validate(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("adiabatic-probe: {e}");
            e.exit_code()
        }
    }
}
