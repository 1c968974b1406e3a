//! `pixtone plan`: carrier placement under the separation and harmonic
//! rules.

use crate::errors::{coded, EXIT_PLAN, EXIT_USAGE};
use anyhow::Result;
use clap::Args;
use pixtone_core::codec::{plan_frequencies, CodecError};

#[derive(Args)]
pub struct PlanArgs {
    /// Number of concurrent channels (screens or strips).
    #[arg(long, default_value_t = 1)]
    channels: usize,
    /// Usable band as fmin,fmax in Hz.
    #[arg(long, value_delimiter = ',', default_values_t = [3_000.0, 20_000.0])]
    band: Vec<f64>,
    /// FSK tone separation within one channel, Hz.
    #[arg(long, default_value_t = 1_000.0)]
    delta_f: f64,
    /// Symbol rate per channel, Hz.
    #[arg(long, default_value_t = 10.0)]
    symbol_rate: f64,
}

pub fn run(args: &PlanArgs) -> Result<()> {
    if args.band.len() != 2 {
        return Err(coded(EXIT_USAGE, "--band takes exactly fmin,fmax"));
    }
    let band = (args.band[0], args.band[1]);
    match plan_frequencies(args.channels, band, args.delta_f, args.symbol_rate) {
        Ok(channels) => {
            let sep = 2.0 * args.delta_f + 2.0 * args.symbol_rate;
            println!(
                "planned {} channel(s) in [{}, {}] Hz (base separation >= {sep} Hz):",
                channels.len(),
                band.0,
                band.1
            );
            for (i, c) in channels.iter().enumerate() {
                println!("channel {i}: f0 = {:.1} Hz, f1 = {:.1} Hz", c.f0, c.f1);
            }
            Ok(())
        }
        Err(e @ CodecError::CannotFit { .. }) => Err(coded(EXIT_PLAN, e.to_string())),
        Err(e) => Err(coded(EXIT_USAGE, e.to_string())),
    }
}
