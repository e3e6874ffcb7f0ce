//! Command-line front end for the spectral design solver.
//!
//! Exit codes: 0 success, 1 I/O or parse error, 2 infeasible budget,
//! 3 certificate check failure.

mod commands;
mod io;
mod svg;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "spectral-design",
    version,
    about = "Provably optimal spectral experimental designs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute an optimal design for a prior matrix; write JSON.
    Design(commands::design::DesignArgs),
    /// Two-dimensional demo: design around point observations; SVG + CSV.
    Demo2d(commands::demo2d::Demo2dArgs),
    /// Re-derive and stress-test the certificate of a design document.
    Verify(commands::verify::VerifyArgs),
    /// Derivative-free optimization benchmark with data profiles.
    DfoBench(commands::dfo_bench::DfoBenchArgs),
}

fn main() {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Design(args) => commands::design::run(args),
        Command::Demo2d(args) => commands::demo2d::run(args),
        Command::Verify(args) => commands::verify::run(args),
        Command::DfoBench(args) => commands::dfo_bench::run(args),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}
