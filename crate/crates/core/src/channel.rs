//! Simulated acoustic channel: schedule in, microphone-style samples out.
//!
//! The physical pathway (pixel transitions exciting power-supply
//! capacitors) is abstracted to "a pattern at frequency f emits a tone at
//! f". Each schedule entry becomes a band-limited square wave (odd
//! harmonics at 1/k amplitude, truncated below Nyquist) with phase carried
//! continuously across entry boundaries. Amplitude folds in the pattern's
//! mean brightness, grayscale-vs-color coherence, the 1/n energy split
//! across concurrent strips, and a distance gain fitted to measured
//! SNR-vs-distance data (linear in dB over 0.5..5 m).

use crate::codec::FrameSchedule;
use crate::spectrum::band_power_analysis;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("carrier {freq} Hz is not below Nyquist ({} Hz)", *sample_rate as f64 / 2.0)]
    CarrierAboveNyquist { freq: f64, sample_rate: u32 },
    #[error("buffer has no signal power")]
    SilentInput,
    #[error("target SNR {0} dB is infeasible for this buffer and band split")]
    InfeasibleTargetSnr(f64),
    #[error("strip count must be at least 1")]
    NoStrips,
}

/// Peak-SNR-vs-distance measurements (meters, dB) from the reference
/// screen; the linear-in-dB distance model is fitted to these rows.
pub const SNR_VS_DISTANCE_DB: [(f64, f64); 10] = [
    (0.5, 22.53),
    (1.0, 20.12),
    (1.5, 18.25),
    (2.0, 16.05),
    (2.5, 14.21),
    (3.0, 12.67),
    (3.5, 11.02),
    (4.0, 9.45),
    (4.5, 7.88),
    (5.0, 6.23),
];

/// Least-squares fit of the table above (slope dB/m, intercept dB). The
/// values are frozen from the fit; the test suite recomputes the regression
/// and checks them.
pub const SNR_FIT_SLOPE_DB_PER_M: f64 = -3.551_636_363_636_363_6;
pub const SNR_FIT_INTERCEPT_DB: f64 = 23.608;

/// Brightness-level stealth table: (level 1..10, mean intensity, SNR dB).
pub const BRIGHTNESS_LEVEL_TABLE: [(f64, f64, f64); 10] = [
    (1.0, 102.34, 5.12),
    (2.0, 145.67, 8.24),
    (3.0, 198.23, 10.78),
    (4.0, 256.78, 12.45),
    (5.0, 312.45, 14.92),
    (6.0, 367.12, 16.78),
    (7.0, 422.89, 18.45),
    (8.0, 478.56, 20.12),
    (9.0, 534.23, 21.45),
    (10.0, 589.90, 22.78),
];

/// Per-channel amplitude factor for color patterns: the three RGB channels
/// carry independent phases, so coherent gain drops by sqrt(3) relative to
/// grayscale.
pub const COLOR_COHERENCE: f64 = 0.577_350_269_189_625_8;

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    pub sample_rate: u32,
    pub distance_m: f64,
    /// Full-scale fraction at the 0.5 m reference distance. Arbitrary; only
    /// ratios are ever measured.
    pub base_amplitude: f64,
    /// Stationary background level, dBFS, used by sweeps that hold noise
    /// fixed while the signal attenuates.
    pub noise_floor_db: f64,
    /// Mean intensity of the displayed pattern (high level scaled by duty),
    /// 0..255.
    pub brightness_mean: f64,
    /// 1.0 for grayscale patterns, [`COLOR_COHERENCE`] for color.
    pub coherence_factor: f64,
    /// Concurrent vertical strips sharing the panel's energy.
    pub strips_n: usize,
    pub snr_slope_db_per_m: f64,
    pub snr_intercept_db: f64,
    /// Skip harmonic synthesis and emit the aliased sign-of-phase square.
    pub naive_square: bool,
}

impl Default for ChannelModel {
    fn default() -> Self {
        ChannelModel {
            sample_rate: 48_000,
            distance_m: 0.5,
            base_amplitude: 0.25,
            noise_floor_db: -90.0,
            brightness_mean: 255.0,
            coherence_factor: 1.0,
            strips_n: 1,
            snr_slope_db_per_m: SNR_FIT_SLOPE_DB_PER_M,
            snr_intercept_db: SNR_FIT_INTERCEPT_DB,
            naive_square: false,
        }
    }
}

impl ChannelModel {
    /// Fitted SNR in dB at distance `d` meters.
    pub fn predicted_snr_db(&self, d: f64) -> f64 {
        self.snr_intercept_db + self.snr_slope_db_per_m * d
    }
}

/// Mono sample sequence. Samples stay unclamped f64 internally; WAV export
/// applies the [-1, 1] limiter.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

impl AudioBuffer {
    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn rms(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        (self.samples.iter().map(|x| x * x).sum::<f64>() / self.samples.len() as f64).sqrt()
    }

    /// Samples clamped to [-1, 1], the final limiting step before export.
    pub fn limited(&self) -> AudioBuffer {
        AudioBuffer {
            samples: self.samples.iter().map(|x| x.clamp(-1.0, 1.0)).collect(),
            sample_rate: self.sample_rate,
        }
    }
}

/// Amplitude gain at distance `d`, linear, normalized to 1.0 at the 0.5 m
/// reference point. Powers (amplitude squared) then follow the fitted dB
/// curve.
pub fn distance_gain(d: f64, model: &ChannelModel) -> f64 {
    let delta_db = model.predicted_snr_db(d) - model.predicted_snr_db(0.5);
    10f64.powf(delta_db / 20.0)
}

fn entry_amplitude(model: &ChannelModel) -> f64 {
    model.base_amplitude
        * (model.brightness_mean / 255.0)
        * model.coherence_factor
        * (1.0 / model.strips_n as f64)
        * distance_gain(model.distance_m, model)
}

/// Band-limited square at `phase` (cycles): odd harmonics below Nyquist,
/// 1/k amplitude, scaled so the ideal (untruncated) wave has unit levels.
fn square_value(phase: f64, freq: f64, nyquist: f64, naive: bool) -> f64 {
    if naive {
        return if phase.fract() < 0.5 { 1.0 } else { -1.0 };
    }
    let mut acc = 0.0;
    let mut k = 1.0;
    while k * freq < nyquist {
        acc += (TAU * k * phase).sin() / k;
        k += 2.0;
    }
    acc * 4.0 / std::f64::consts::PI
}

pub fn synthesize(
    schedule: &FrameSchedule,
    model: &ChannelModel,
) -> Result<AudioBuffer, ChannelError> {
    synthesize_scaled(schedule, model, model.strips_n)
}

/// Synthesizes several concurrent schedules (one per strip) and sums them.
/// The panel's energy splits evenly, so each stream is scaled by
/// 1/len(schedules) regardless of `model.strips_n`.
pub fn synthesize_multi(
    schedules: &[FrameSchedule],
    model: &ChannelModel,
) -> Result<AudioBuffer, ChannelError> {
    if schedules.is_empty() {
        return Err(ChannelError::NoStrips);
    }
    let n = schedules.len();
    let mut buffers = Vec::with_capacity(n);
    for s in schedules {
        buffers.push(synthesize_scaled(s, model, n)?);
    }
    let len = buffers.iter().map(|b| b.samples.len()).max().unwrap();
    let mut samples = vec![0.0; len];
    for b in &buffers {
        for (i, &x) in b.samples.iter().enumerate() {
            samples[i] += x;
        }
    }
    Ok(AudioBuffer {
        samples,
        sample_rate: model.sample_rate,
    })
}

fn synthesize_scaled(
    schedule: &FrameSchedule,
    model: &ChannelModel,
    strips_n: usize,
) -> Result<AudioBuffer, ChannelError> {
    if strips_n == 0 {
        return Err(ChannelError::NoStrips);
    }
    let sr = model.sample_rate as f64;
    let nyquist = sr / 2.0;
    for e in &schedule.entries {
        if e.freq_hz != 0.0 && !(e.freq_hz > 0.0 && e.freq_hz < nyquist) {
            return Err(ChannelError::CarrierAboveNyquist {
                freq: e.freq_hz,
                sample_rate: model.sample_rate,
            });
        }
    }
    let amp = entry_amplitude(&ChannelModel {
        strips_n,
        ..model.clone()
    });

    let total_samples = (schedule.total_duration() * sr).round() as usize;
    let mut samples = Vec::with_capacity(total_samples);
    // Fundamental phase in cycles, carried across entries so symbol
    // boundaries stay click-free. Harmonics at k times this phase stay
    // continuous with it.
    let mut phase: f64 = 0.0;
    let mut t_cum = 0.0;
    for e in &schedule.entries {
        t_cum += e.duration_s;
        let end = (t_cum * sr).round() as usize;
        while samples.len() < end {
            if e.freq_hz == 0.0 {
                samples.push(0.0);
            } else {
                samples.push(amp * square_value(phase, e.freq_hz, nyquist, model.naive_square));
                phase += e.freq_hz / sr;
                phase -= phase.floor();
            }
        }
    }
    Ok(AudioBuffer {
        samples,
        sample_rate: model.sample_rate,
    })
}

/// Adds the model's stationary background: white Gaussian noise at
/// `noise_floor_db` relative to full scale, independent of the signal
/// level. Recordings without an explicit SNR target sit on this floor.
pub fn add_noise_floor(
    buf: &AudioBuffer,
    model: &ChannelModel,
    seed: u64,
) -> AudioBuffer {
    let variance = 10f64.powf(model.noise_floor_db / 10.0);
    let normal = Normal::new(0.0, variance.sqrt()).expect("variance is finite and positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    AudioBuffer {
        samples: buf
            .samples
            .iter()
            .map(|&x| x + normal.sample(&mut rng))
            .collect(),
        sample_rate: buf.sample_rate,
    }
}

/// Adds zero-mean white Gaussian noise with variance `mean_square /
/// 10^(snr_db/10)`: the classic total-power channel SNR, well defined at
/// any dB value. BER sweeps use this knob.
pub fn add_noise_total(
    buf: &AudioBuffer,
    snr_db: f64,
    seed: u64,
) -> Result<AudioBuffer, ChannelError> {
    if snr_db.is_infinite() && snr_db > 0.0 {
        return Ok(buf.clone());
    }
    let mean_sq = buf.samples.iter().map(|x| x * x).sum::<f64>() / buf.samples.len().max(1) as f64;
    if mean_sq <= 0.0 {
        return Err(ChannelError::SilentInput);
    }
    let variance = mean_sq / 10f64.powf(snr_db / 10.0);
    let normal = Normal::new(0.0, variance.sqrt()).expect("variance is finite and positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(AudioBuffer {
        samples: buf
            .samples
            .iter()
            .map(|&x| x + normal.sample(&mut rng))
            .collect(),
        sample_rate: buf.sample_rate,
    })
}

/// Adds zero-mean white Gaussian noise scaled so that the SNR measured
/// against `signal_freqs` (see [`crate::receiver::measure_snr`]) comes out
/// at `target_snr_db`. Deterministic for a given seed; an infinite target
/// returns the buffer unchanged.
///
/// The target must be achievable for the buffer and band split: above the
/// ratio of signal to noise bins (else even infinite noise rates higher)
/// and below the clean buffer's own leakage floor (keying sidebands
/// outside `band_halfwidth` count as noise and no amount of added noise
/// can raise the SNR). Out-of-range targets error rather than landing
/// outside the +/-0.5 dB contract.
pub fn add_noise(
    buf: &AudioBuffer,
    target_snr_db: f64,
    seed: u64,
    signal_freqs: &[f64],
    band_halfwidth: f64,
) -> Result<AudioBuffer, ChannelError> {
    if target_snr_db.is_infinite() && target_snr_db > 0.0 {
        return Ok(buf.clone());
    }
    let mean_sq = buf.samples.iter().map(|x| x * x).sum::<f64>() / buf.samples.len().max(1) as f64;
    if mean_sq <= 0.0 {
        return Err(ChannelError::SilentInput);
    }
    let a = band_power_analysis(&buf.samples, buf.sample_rate, signal_freqs, band_halfwidth);
    let t = 10f64.powf(target_snr_db / 10.0);
    let n = a.total_bins as f64;
    // White noise of variance v spreads v/N per bin. Solve for v so that
    // (clean signal-band power + its noise share) over (clean leakage +
    // the noise share elsewhere) equals the target ratio.
    let denom = t * a.noise_bins as f64 - a.signal_bins as f64;
    let numer = a.signal_power - t * a.noise_power;
    if denom <= 0.0 || numer <= 0.0 {
        return Err(ChannelError::InfeasibleTargetSnr(target_snr_db));
    }
    let variance = n * numer / denom;
    let normal = Normal::new(0.0, variance.sqrt()).expect("variance is finite and positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = buf
        .samples
        .iter()
        .map(|&x| x + normal.sample(&mut rng))
        .collect();
    Ok(AudioBuffer {
        samples,
        sample_rate: buf.sample_rate,
    })
}

/// Predicted SNR for a stealth brightness level (1..10 scale), linearly
/// interpolated between the table rows.
pub fn brightness_to_snr(level: f64, _model: &ChannelModel) -> f64 {
    let table = &BRIGHTNESS_LEVEL_TABLE;
    let clamped = level.clamp(table[0].0, table[table.len() - 1].0);
    for pair in table.windows(2) {
        let (l0, _, s0) = pair[0];
        let (l1, _, s1) = pair[1];
        if clamped <= l1 {
            let frac = (clamped - l0) / (l1 - l0);
            return s0 + frac * (s1 - s0);
        }
    }
    table[table.len() - 1].2
}

/// Grayscale variant: maps 0..255 onto the 1..10 level scale first.
pub fn brightness_to_snr_gray(gray: u8, model: &ChannelModel) -> f64 {
    let level = 1.0 + 9.0 * gray as f64 / 255.0;
    brightness_to_snr(level, model)
}

/// Total energy of a grayscale image: the three identical RGB channels add
/// coherently, 3 * sum(I^2).
pub fn grayscale_energy(intensities: &[f64]) -> f64 {
    3.0 * intensities.iter().map(|i| i * i).sum::<f64>()
}

/// Total energy of a color image: channels vary independently, so their
/// energies simply add.
pub fn color_energy(r: &[f64], g: &[f64], b: &[f64]) -> f64 {
    debug_assert!(r.len() == g.len() && g.len() == b.len());
    r.iter().map(|v| v * v).sum::<f64>()
        + g.iter().map(|v| v * v).sum::<f64>()
        + b.iter().map(|v| v * v).sum::<f64>()
}

/// Discrete inner product of two cosine subcarriers over one symbol window.
/// Vanishes (up to rounding) when both the difference and sum frequencies
/// are multiples of 1/duration, the OFDM orthogonality condition.
pub fn subcarrier_inner_product(f_i: f64, f_j: f64, duration_s: f64, sample_rate: u32) -> f64 {
    let n = (duration_s * sample_rate as f64).round() as usize;
    let sr = sample_rate as f64;
    (0..n)
        .map(|k| {
            let t = k as f64 / sr;
            (TAU * f_i * t).cos() * (TAU * f_j * t).cos()
        })
        .sum()
}
