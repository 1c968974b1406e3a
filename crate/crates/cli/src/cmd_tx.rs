//! `pixtone tx`: payloads -> packets -> FSK schedule -> simulated channel
//! -> WAV, schedule text, and manifest.

use crate::config::FileConfig;
use crate::errors::{coded, EXIT_USAGE};
use crate::manifest::RunManifest;
use crate::wav::write_wav;
use anyhow::Result;
use clap::Args;
use pixtone_core::channel::{
    add_noise, add_noise_floor, synthesize, synthesize_multi, ChannelModel, COLOR_COHERENCE,
};
use pixtone_core::codec::{packets_to_schedule, ModemConfig, Packet, PacketHeader, Protocol};
use pixtone_core::receiver::default_band_halfwidth;
use std::path::PathBuf;

#[derive(Args)]
pub struct TxArgs {
    /// Payload as hex (e.g. 0xDEADBEEF); repeat for multiple packets, or
    /// once per strip with --strips. Defaults to a single zero payload.
    #[arg(long)]
    payload: Vec<String>,
    /// Add the optional header with this 4-bit packet type; sequence
    /// numbers count packets.
    #[arg(long)]
    header_type: Option<u8>,

    /// Carrier for bit 0 (2-FSK shorthand).
    #[arg(long, default_value_t = 3_000.0)]
    f0: f64,
    /// Carrier for bit 1 (2-FSK shorthand).
    #[arg(long, default_value_t = 7_800.0)]
    f1: f64,
    /// Full carrier list: M frequencies per strip, comma separated.
    /// Overrides --f0/--f1.
    #[arg(long, value_delimiter = ',')]
    freqs: Option<Vec<f64>>,
    /// Symbol alphabet size per strip.
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Bit duration in milliseconds.
    #[arg(long, default_value_t = 100.0)]
    tb_ms: f64,
    /// Pattern duty cycle.
    #[arg(long, default_value_t = 0.5)]
    duty: f64,
    /// Silent gap before/between/after packets, in symbol durations.
    #[arg(long, default_value_t = 2.0)]
    gap_symbols: f64,

    /// Concurrent vertical strips; needs one payload and M carriers each.
    #[arg(long, default_value_t = 1)]
    strips: usize,
    /// Target in-band SNR in dB; omitted, the recording sits on the
    /// model's background noise floor.
    #[arg(long)]
    snr: Option<f64>,
    /// Band halfwidth for the SNR accounting (defaults to 10 symbol rates).
    #[arg(long)]
    snr_band: Option<f64>,
    /// Receiver distance in meters.
    #[arg(long, default_value_t = 0.5)]
    distance: f64,
    /// Mean pattern brightness, 0-255.
    #[arg(long, default_value_t = 255.0)]
    brightness: f64,
    /// Model a color pattern (independent RGB phases) instead of grayscale.
    #[arg(long)]
    color: bool,
    #[arg(long)]
    sample_rate: Option<u32>,

    /// Output wave file.
    #[arg(long, default_value = "tx.wav")]
    wav: PathBuf,
    /// Schedule text file (defaults to the wave path with .sched).
    #[arg(long)]
    schedule: Option<PathBuf>,
}

fn parse_payload(s: &str) -> Result<u32> {
    let trimmed = s.trim_start_matches("0x").trim_start_matches("0X");
    u32::from_str_radix(trimmed, 16)
        .map_err(|_| coded(EXIT_USAGE, format!("payload `{s}` is not 32-bit hex")))
}

pub fn run(args: &TxArgs, file_cfg: &FileConfig, seed: u64) -> Result<()> {
    let payloads: Vec<u32> = if args.payload.is_empty() {
        vec![0]
    } else {
        args.payload
            .iter()
            .map(|p| parse_payload(p))
            .collect::<Result<_>>()?
    };
    if args.m < 2 || !args.m.is_power_of_two() {
        return Err(coded(
            EXIT_USAGE,
            "alphabet size must be a power of two >= 2",
        ));
    }
    let all_freqs = args.freqs.clone().unwrap_or_else(|| vec![args.f0, args.f1]);
    if all_freqs.len() != args.m * args.strips {
        return Err(coded(
            EXIT_USAGE,
            format!(
                "need {} carriers ({} per strip x {} strips), got {}",
                args.m * args.strips,
                args.m,
                args.strips,
                all_freqs.len()
            ),
        ));
    }
    if args.strips > 1 && payloads.len() != args.strips {
        return Err(coded(
            EXIT_USAGE,
            format!(
                "--strips {} needs exactly that many --payload values",
                args.strips
            ),
        ));
    }

    let protocol = Protocol {
        preamble: file_cfg
            .preamble
            .unwrap_or(pixtone_core::codec::DEFAULT_PREAMBLE),
    };
    let tb = args.tb_ms / 1000.0;
    let model = ChannelModel {
        sample_rate: args.sample_rate.or(file_cfg.sample_rate).unwrap_or(48_000),
        distance_m: args.distance,
        brightness_mean: args.brightness,
        coherence_factor: if args.color { COLOR_COHERENCE } else { 1.0 },
        strips_n: args.strips,
        base_amplitude: file_cfg.base_amplitude.unwrap_or(0.25),
        ..ChannelModel::default()
    };

    let make_packets = |payloads: &[u32]| -> Result<Vec<Packet>> {
        payloads
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let header = match args.header_type {
                    Some(t) => Some(
                        PacketHeader::new(t, (i % 16) as u8)
                            .map_err(|e| coded(EXIT_USAGE, e.to_string()))?,
                    ),
                    None => None,
                };
                Ok(protocol.encode(p, header))
            })
            .collect()
    };

    let mut modems = Vec::new();
    let mut schedules = Vec::new();
    for strip in 0..args.strips {
        let freqs = all_freqs[strip * args.m..(strip + 1) * args.m].to_vec();
        let mut modem =
            ModemConfig::new(freqs, tb).map_err(|e| coded(EXIT_USAGE, e.to_string()))?;
        modem.duty_cycle = args.duty;
        let strip_payloads: Vec<u32> = if args.strips > 1 {
            vec![payloads[strip]]
        } else {
            payloads.clone()
        };
        let packets = make_packets(&strip_payloads)?;
        schedules.push(packets_to_schedule(&packets, &modem, args.gap_symbols));
        modems.push(modem);
    }

    let clean = if args.strips > 1 {
        synthesize_multi(&schedules, &model)
    } else {
        synthesize(&schedules[0], &model)
    }
    .map_err(|e| coded(EXIT_USAGE, e.to_string()))?;

    let buf = match args.snr {
        Some(target) => {
            let bw = args
                .snr_band
                .unwrap_or_else(|| default_band_halfwidth(modems[0].symbol_duration()));
            add_noise(&clean, target, seed, &all_freqs, bw)
                .map_err(|e| coded(EXIT_USAGE, e.to_string()))?
        }
        // No target: the recording sits on the model's background floor.
        None => add_noise_floor(&clean, &model, seed),
    };

    write_wav(&buf, &args.wav)?;
    let sched_path = args
        .schedule
        .clone()
        .unwrap_or_else(|| args.wav.with_extension("sched"));
    let mut sched_text = format!("# seed={seed}\n");
    for (i, sched) in schedules.iter().enumerate() {
        if schedules.len() > 1 {
            sched_text.push_str(&format!("# strip {i}\n"));
        }
        sched_text.push_str(&sched.to_text());
    }
    std::fs::write(&sched_path, sched_text)?;

    let mut manifest = RunManifest::new("tx", seed);
    manifest
        .param(
            "payloads",
            payloads
                .iter()
                .map(|p| format!("{p:#010x}"))
                .collect::<Vec<_>>()
                .join(","),
        )
        .param(
            "carriers",
            all_freqs
                .iter()
                .map(|f| f.to_string())
                .collect::<Vec<_>>()
                .join(","),
        )
        .param("tb_ms", args.tb_ms)
        .param("strips", args.strips)
        .param("distance_m", args.distance)
        .param("sample_rate", model.sample_rate);
    if let Some(snr) = args.snr {
        manifest.param("snr_db", snr);
    }
    manifest.output(&args.wav).output(&sched_path);
    manifest.write()?;

    println!(
        "wrote {} ({:.3} s at {} Hz) and {}",
        args.wav.display(),
        buf.duration_s(),
        buf.sample_rate,
        sched_path.display()
    );
    Ok(())
}
