//! `pixtone gen`: square-wave and split bitmaps to P5 graymaps.

use crate::config::{resolve_display, DisplayArgs, FileConfig};
use crate::errors::{coded, EXIT_USAGE};
use anyhow::Result;
use clap::Args;
use pixtone_core::pattern::{
    cycle_size, generate_split_bitmap, generate_square_bitmap_mode, GenMode, PatternSpec, SplitSpec,
};
use pixtone_core::pgm::write_pgm_file;
use std::path::PathBuf;

#[derive(Args)]
pub struct GenArgs {
    /// Named timing: 1080p60-cea, 1080p60, 720p60, 1680x1050@60.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    width: Option<u32>,
    #[arg(long)]
    height: Option<u32>,
    /// Refresh rate in Hz.
    #[arg(long)]
    refresh: Option<u32>,
    /// Horizontal trace pixels per row.
    #[arg(long)]
    h_blank: Option<u32>,
    /// Vertical trace rows per frame.
    #[arg(long)]
    v_blank: Option<u32>,
    /// Blanking overhead ratio (alternative to explicit trace pixels).
    #[arg(long)]
    beta: Option<f64>,

    /// Target wave frequency in Hz.
    #[arg(long, required_unless_present = "split")]
    freq: Option<f64>,
    /// Duty cycle in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    duty: f64,
    /// Comma-separated strip frequencies for a vertical split pattern.
    #[arg(long, value_delimiter = ',')]
    split: Option<Vec<f64>>,
    /// Derive the pattern phase from the blanking-adjusted clock.
    #[arg(long)]
    effective_clock: bool,
    /// Literal integer-truncation generation for conformance checks.
    #[arg(long)]
    conformance: bool,
    /// Output graymap path.
    #[arg(long, default_value = "pattern.pgm")]
    out: PathBuf,
}

pub fn run(args: &GenArgs, file_cfg: &FileConfig) -> Result<()> {
    let cfg = resolve_display(
        &DisplayArgs {
            preset: args.preset.clone(),
            width: args.width,
            height: args.height,
            refresh: args.refresh,
            h_blank: args.h_blank,
            v_blank: args.v_blank,
            beta: args.beta,
        },
        file_cfg,
    )?;

    let bitmap = if let Some(freqs) = &args.split {
        let clock = cfg.effective_pixel_clock();
        let split = SplitSpec {
            region_freqs: freqs.clone(),
        };
        let bmp = generate_split_bitmap(&cfg, &split, args.duty)
            .map_err(|e| coded(EXIT_USAGE, e.to_string()))?;
        println!("effective pixel clock: {clock} Hz");
        println!("strip width: {} px", cfg.width / freqs.len() as u32);
        for (i, &f) in freqs.iter().enumerate() {
            let c = cycle_size(clock, f).map_err(|e| coded(EXIT_USAGE, e.to_string()))?;
            println!("strip {i}: {f} Hz, cycle size {c} px");
        }
        bmp
    } else {
        let freq = args.freq.expect("clap enforces freq without split");
        let clock = if args.effective_clock {
            cfg.effective_pixel_clock()
        } else {
            cfg.nominal_pixel_clock() as f64
        };
        let spec = PatternSpec {
            use_effective_clock: args.effective_clock,
            ..PatternSpec::new(freq, args.duty)
        };
        let mode = if args.conformance {
            GenMode::IntegerTruncation
        } else {
            GenMode::PhaseAccumulator
        };
        let bmp = generate_square_bitmap_mode(&cfg, &spec, mode)
            .map_err(|e| coded(EXIT_USAGE, e.to_string()))?;
        let c = cycle_size(clock, freq).map_err(|e| coded(EXIT_USAGE, e.to_string()))?;
        println!(
            "pixel clock: {clock} Hz ({})",
            if args.effective_clock {
                "effective"
            } else {
                "nominal"
            }
        );
        println!("effective pixel clock: {} Hz", cfg.effective_pixel_clock());
        println!("cycle size: {c} px");
        bmp
    };
    write_pgm_file(&bitmap, &args.out)?;
    println!("wrote {}", args.out.display());
    Ok(())
}
