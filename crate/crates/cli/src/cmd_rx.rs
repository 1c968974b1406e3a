//! `pixtone rx`: WAV in, decoded packet report out.

use crate::config::FileConfig;
use crate::errors::{coded, EXIT_CHANNEL, EXIT_DECODE, EXIT_USAGE};
use crate::wav::read_wav;
use anyhow::Result;
use clap::Args;
use pixtone_core::codec::DEFAULT_PREAMBLE;
use pixtone_core::pgm::write_pgm_file;
use pixtone_core::receiver::{demodulate, spectrogram, DemodConfig, ReceiverError};
use std::path::PathBuf;

#[derive(Args)]
pub struct RxArgs {
    /// Input wave file (16-bit or float mono PCM).
    input: PathBuf,
    /// Carrier for bit 0 (2-FSK shorthand).
    #[arg(long, default_value_t = 3_000.0)]
    f0: f64,
    /// Carrier for bit 1 (2-FSK shorthand).
    #[arg(long, default_value_t = 7_800.0)]
    f1: f64,
    /// Full carrier list (overrides --f0/--f1).
    #[arg(long, value_delimiter = ',')]
    freqs: Option<Vec<f64>>,
    /// Bit duration in milliseconds.
    #[arg(long, default_value_t = 100.0)]
    tb_ms: f64,
    /// Preamble decision margin in dB.
    #[arg(long, default_value_t = 6.0)]
    margin_db: f64,
    /// Write a spectrogram next to the decode (.csv or .pgm by extension).
    #[arg(long)]
    spectrogram: Option<PathBuf>,
    /// Spectrogram window length in samples.
    #[arg(long, default_value_t = 1024)]
    window: usize,
    /// Spectrogram hop in samples.
    #[arg(long, default_value_t = 256)]
    hop: usize,
}

pub fn run(args: &RxArgs, file_cfg: &FileConfig) -> Result<()> {
    let buf = read_wav(&args.input)?;
    let freqs = args.freqs.clone().unwrap_or_else(|| vec![args.f0, args.f1]);
    let mut cfg = DemodConfig::new(freqs, args.tb_ms / 1000.0)
        .map_err(|e| coded(EXIT_USAGE, e.to_string()))?;
    cfg.decision_margin_db = args.margin_db;
    cfg.preamble = file_cfg.preamble.unwrap_or(DEFAULT_PREAMBLE);

    if let Some(path) = &args.spectrogram {
        let sg = spectrogram(&buf, args.window, args.hop)
            .map_err(|e| coded(EXIT_USAGE, e.to_string()))?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => std::fs::write(path, sg.to_csv())?,
            Some("pgm") => write_pgm_file(&sg.to_bitmap(), path)?,
            _ => {
                return Err(coded(
                    EXIT_USAGE,
                    "spectrogram path must end in .csv or .pgm",
                ))
            }
        }
        println!("wrote spectrogram {}", path.display());
    }

    let result = match demodulate(&buf, &cfg) {
        Ok(r) => r,
        Err(e @ ReceiverError::NoTransmission { .. }) => {
            return Err(coded(EXIT_CHANNEL, format!("no transmission found: {e}")))
        }
        Err(e) => return Err(coded(EXIT_USAGE, e.to_string())),
    };

    println!("sync offset: {} samples", result.sync_offset);
    if result.measured_snr_db.is_finite() {
        println!("measured SNR: {:.2} dB", result.measured_snr_db);
    } else {
        println!("measured SNR: inf (no measurable noise)");
    }
    println!("symbols decoded: {}", result.symbol_scores.len());
    if result.packets.is_empty() {
        return Err(coded(
            EXIT_DECODE,
            "transmission present but no packet passed preamble and checksum",
        ));
    }
    for (i, pkt) in result.packets.iter().enumerate() {
        match pkt.header {
            Some(h) => println!(
                "packet {i}: payload {:#010x}  header type={} seq={}  checksum OK",
                pkt.payload, h.packet_type, h.sequence
            ),
            None => println!("packet {i}: payload {:#010x}  checksum OK", pkt.payload),
        }
    }
    Ok(())
}
