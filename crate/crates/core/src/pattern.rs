//! Square-wave bitmap generation and measurement.
//!
//! A bitmap drives the display at one spatial frequency: pixel index `s`
//! (row-major, continuing across rows) is high for the first `duty` fraction
//! of every `cycleSize = pixel_clock / freq` pixels. Cycle sizes are rarely
//! integers, so the default generator decides each pixel from the exact
//! phase `frac(s * freq / clock)` instead of truncating the cycle to whole
//! pixels; truncation biases the emitted frequency while the phase test
//! keeps it exact in the long run. A truncating mode is kept for
//! conformance against the classic integer formulation.

use crate::display::{Blanking, DisplayConfig};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PatternError {
    #[error("target frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),
    #[error("frequency {freq} Hz needs more than two pixels per cycle at clock {clock} Hz")]
    FrequencyTooHigh { freq: f64, clock: f64 },
    #[error("duty cycle must lie strictly between 0 and 1, got {0}")]
    BadDutyCycle(f64),
    #[error("low level {low} must be below high level {high}")]
    BadLevels { low: u8, high: u8 },
    #[error("cannot split {width} columns into {regions} regions")]
    TooManyRegions { width: u32, regions: usize },
    #[error("split needs at least one region frequency")]
    EmptySplit,
    #[error("bitmap has no transitions; cannot measure a frequency")]
    NoTransitions,
    #[error("bitmap is empty")]
    EmptyBitmap,
}

/// Row-major grayscale pixel grid holding one square-wave pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bitmap {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<u8>,
}

impl Bitmap {
    pub fn new(width: u32, height: u32, fill: u8) -> Self {
        Bitmap {
            width,
            height,
            pixels: vec![fill; width as usize * height as usize],
        }
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, value: u8) {
        self.pixels[y as usize * self.width as usize + x as usize] = value;
    }

    /// Fraction of pixels at or above the high/low midpoint.
    pub fn high_fraction(&self) -> f64 {
        if self.pixels.is_empty() {
            return 0.0;
        }
        let min = *self.pixels.iter().min().unwrap();
        let max = *self.pixels.iter().max().unwrap();
        let mid = min as u16 + (max as u16 - min as u16).div_ceil(2);
        let high = self.pixels.iter().filter(|&&p| p as u16 >= mid).count();
        high as f64 / self.pixels.len() as f64
    }
}

/// One square-wave pattern: target acoustic frequency, duty cycle, and the
/// two intensity levels it alternates between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternSpec {
    pub target_freq: f64,
    pub duty_cycle: f64,
    pub high_level: u8,
    pub low_level: u8,
    /// Derive the phase from the blanking-adjusted pixel clock. With
    /// explicit blanking the sample counter then also skips `h_blank`
    /// positions at the end of every row, so the visible pattern stays
    /// aligned with the wall-clock scan.
    pub use_effective_clock: bool,
}

impl PatternSpec {
    pub fn new(target_freq: f64, duty_cycle: f64) -> Self {
        PatternSpec {
            target_freq,
            duty_cycle,
            high_level: 255,
            low_level: 0,
            use_effective_clock: false,
        }
    }

    fn validate(&self, clock: f64) -> Result<(), PatternError> {
        if !(self.duty_cycle > 0.0 && self.duty_cycle < 1.0) {
            return Err(PatternError::BadDutyCycle(self.duty_cycle));
        }
        if self.low_level >= self.high_level {
            return Err(PatternError::BadLevels {
                low: self.low_level,
                high: self.high_level,
            });
        }
        validate_frequency(self.target_freq, clock)
    }
}

/// Vertical split: one carrier frequency per strip, left to right.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSpec {
    pub region_freqs: Vec<f64>,
}

/// How pixels are quantized against the wave cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenMode {
    /// Exact phase test: pixel high iff `frac(s * freq / clock) < duty`.
    PhaseAccumulator,
    /// Classic integer formulation: cycle size and high-pixel count are
    /// truncated to whole pixels before the modulo test.
    IntegerTruncation,
}

fn validate_frequency(freq: f64, clock: f64) -> Result<(), PatternError> {
    if !freq.is_finite() || freq <= 0.0 {
        return Err(PatternError::NonPositiveFrequency(freq));
    }
    if freq > clock / 2.0 {
        return Err(PatternError::FrequencyTooHigh { freq, clock });
    }
    Ok(())
}

/// Pixels per wave cycle: `pixel_clock / freq`. Callers quantize; see
/// [`GenMode`].
pub fn cycle_size(pixel_clock_hz: f64, freq_hz: f64) -> Result<f64, PatternError> {
    if !freq_hz.is_finite() || freq_hz <= 0.0 {
        return Err(PatternError::NonPositiveFrequency(freq_hz));
    }
    Ok(pixel_clock_hz / freq_hz)
}

fn selected_clock(cfg: &DisplayConfig, use_effective: bool) -> f64 {
    if use_effective {
        cfg.effective_pixel_clock()
    } else {
        cfg.nominal_pixel_clock() as f64
    }
}

pub fn generate_square_bitmap(
    cfg: &DisplayConfig,
    spec: &PatternSpec,
) -> Result<Bitmap, PatternError> {
    generate_square_bitmap_mode(cfg, spec, GenMode::PhaseAccumulator)
}

pub fn generate_square_bitmap_mode(
    cfg: &DisplayConfig,
    spec: &PatternSpec,
    mode: GenMode,
) -> Result<Bitmap, PatternError> {
    let clock = selected_clock(cfg, spec.use_effective_clock);
    let row_skip = match (spec.use_effective_clock, cfg.blanking) {
        (true, Blanking::Explicit { h_blank, .. }) => h_blank as u64,
        _ => 0,
    };
    render_square(clock, cfg.width, cfg.height, spec, row_skip, mode)
}

/// Renders against an explicitly given pixel clock with a contiguous sample
/// counter, the way the algorithm is stated (clock, frequency, and
/// dimensions are independent inputs there).
pub fn generate_square_bitmap_with_clock(
    pixel_clock_hz: f64,
    width: u32,
    height: u32,
    spec: &PatternSpec,
    mode: GenMode,
) -> Result<Bitmap, PatternError> {
    render_square(pixel_clock_hz, width, height, spec, 0, mode)
}

fn render_square(
    clock: f64,
    width: u32,
    height: u32,
    spec: &PatternSpec,
    row_skip: u64,
    mode: GenMode,
) -> Result<Bitmap, PatternError> {
    spec.validate(clock)?;
    let (w, h) = (width as usize, height as usize);
    let mut pixels = Vec::with_capacity(w * h);
    match mode {
        GenMode::PhaseAccumulator => {
            let mut s: u64 = 0;
            for _y in 0..h {
                for _x in 0..w {
                    let phase = (s as f64 * spec.target_freq / clock).fract();
                    pixels.push(if phase < spec.duty_cycle {
                        spec.high_level
                    } else {
                        spec.low_level
                    });
                    s += 1;
                }
                s += row_skip;
            }
        }
        GenMode::IntegerTruncation => {
            let cycle = (clock / spec.target_freq).floor() as u64;
            debug_assert!(cycle >= 2);
            let high_pixels = (spec.duty_cycle * cycle as f64).floor() as u64;
            let mut s: u64 = 0;
            for _y in 0..h {
                for _x in 0..w {
                    pixels.push(if s % cycle < high_pixels {
                        spec.high_level
                    } else {
                        spec.low_level
                    });
                    s += 1;
                }
                s += row_skip;
            }
        }
    }
    Ok(Bitmap {
        width,
        height,
        pixels,
    })
}

/// Paint `n` vertical strips, each `floor(W/n)` columns wide, each carrying
/// its own frequency with an independent row-major sample counter. Leftover
/// columns on the right are left at the low level. The blanking-adjusted
/// clock governs all strips.
pub fn generate_split_bitmap(
    cfg: &DisplayConfig,
    split: &SplitSpec,
    duty_cycle: f64,
) -> Result<Bitmap, PatternError> {
    let n = split.region_freqs.len();
    if n == 0 {
        return Err(PatternError::EmptySplit);
    }
    if n as u64 > cfg.width as u64 {
        return Err(PatternError::TooManyRegions {
            width: cfg.width,
            regions: n,
        });
    }
    if !(duty_cycle > 0.0 && duty_cycle < 1.0) {
        return Err(PatternError::BadDutyCycle(duty_cycle));
    }
    let clock = cfg.effective_pixel_clock();
    for &f in &split.region_freqs {
        validate_frequency(f, clock)?;
    }

    let w_region = cfg.width / n as u32;
    let mut bmp = Bitmap::new(cfg.width, cfg.height, 0);
    for (i, &freq) in split.region_freqs.iter().enumerate() {
        let x0 = i as u32 * w_region;
        let mut s: u64 = 0;
        for y in 0..cfg.height {
            for x in x0..x0 + w_region {
                let phase = (s as f64 * freq / clock).fract();
                bmp.set(x, y, if phase < duty_cycle { 255 } else { 0 });
                s += 1;
            }
        }
    }
    Ok(bmp)
}

/// Recover the dominant frequency of a two-level bitmap: the mean distance
/// between rising edges of the flattened pixel sequence is the cycle size
/// in pixels, and `pixel_clock / cycle` is the frequency.
pub fn measure_bitmap_frequency(bmp: &Bitmap, pixel_clock_hz: f64) -> Result<f64, PatternError> {
    if bmp.pixels.is_empty() {
        return Err(PatternError::EmptyBitmap);
    }
    let min = *bmp.pixels.iter().min().unwrap();
    let max = *bmp.pixels.iter().max().unwrap();
    if min == max {
        return Err(PatternError::NoTransitions);
    }
    let mid = min as u16 + (max as u16 - min as u16).div_ceil(2);
    let mut first_rising: Option<usize> = None;
    let mut last_rising = 0usize;
    let mut rising_count = 0usize;
    let mut prev_high = bmp.pixels[0] as u16 >= mid;
    for (i, &p) in bmp.pixels.iter().enumerate().skip(1) {
        let high = p as u16 >= mid;
        if high && !prev_high {
            if first_rising.is_none() {
                first_rising = Some(i);
            }
            last_rising = i;
            rising_count += 1;
        }
        prev_high = high;
    }
    if rising_count < 2 {
        return Err(PatternError::NoTransitions);
    }
    let span = (last_rising - first_rising.unwrap()) as f64;
    let mean_cycle = span / (rising_count - 1) as f64;
    Ok(pixel_clock_hz / mean_cycle)
}
