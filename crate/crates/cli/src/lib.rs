//! Command-line front end for the `wavebreak` library: simulations, region
//! classification, bounds, phase portraits, sweeps and SVG plots.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod svg;
pub mod sweep;

pub use args::Cli;
use args::Command;
use config::Config;
use error::CliError;

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let ctx = commands::Context { out: cli.out, config };
    match cli.command {
        Command::Simulate(a) => commands::simulate(&ctx, a),
        Command::Classify(a) => commands::classify(&ctx, a),
        Command::Bounds(a) => commands::bounds(&ctx, a),
        Command::Phase(a) => commands::phase(&ctx, a),
        Command::Portrait(a) => commands::portrait(&ctx, a),
        Command::Sweep(a) => commands::sweep(&ctx, a),
        Command::Plot(a) => commands::plot(&ctx, a),
    }
}
