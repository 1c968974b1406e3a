//! `pixtone`: pattern generation, simulated transmission and reception,
//! frequency planning, and evaluation sweeps over the LCD acoustic channel.
//!
//! Exit codes are a stable scripting contract: 0 success, 2 usage error,
//! 3 channel failure (no transmission found), 4 infeasible frequency plan,
//! 5 decode failure (transmission present but no checksum-valid packet).

mod cmd_analyze;
mod cmd_gen;
mod cmd_plan;
mod cmd_rx;
mod cmd_tx;
mod config;
mod errors;
mod manifest;
mod plot;
mod wav;

use clap::{Parser, Subcommand};
use errors::exit_code_of;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "pixtone",
    version,
    about = "Software modem for the LCD pixel-pattern acoustic channel"
)]
pub struct Cli {
    /// Key-value config file (display timing, preamble, channel defaults).
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,

    /// RNG seed; recorded in every output for reproducibility.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a square-wave bitmap (P5 graymap).
    Gen(cmd_gen::GenArgs),
    /// Encode payloads and synthesize the transmission into a WAV file.
    Tx(cmd_tx::TxArgs),
    /// Demodulate a WAV file back to packets.
    Rx(cmd_rx::RxArgs),
    /// Plan non-harmonic FSK carrier sets for concurrent channels.
    Plan(cmd_plan::PlanArgs),
    /// Run evaluation sweeps (distance, ber, rates, strips) to CSV + plots.
    Analyze(cmd_analyze::AnalyzeArgs),
}

fn main() -> ExitCode {
    // Die quietly on a closed pipe (`pixtone ... | head`) instead of
    // panicking mid-report.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let file_cfg = match config::FileConfig::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let result = match &cli.command {
        Command::Gen(args) => cmd_gen::run(args, &file_cfg),
        Command::Tx(args) => cmd_tx::run(args, &file_cfg, cli.seed),
        Command::Rx(args) => cmd_rx::run(args, &file_cfg),
        Command::Plan(args) => cmd_plan::run(args),
        Command::Analyze(args) => cmd_analyze::run(args, cli.seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_of(&e))
        }
    }
}
