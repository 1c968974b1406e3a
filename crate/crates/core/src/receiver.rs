//! Demodulation: tone scoring, preamble synchronization, packet recovery,
//! SNR measurement, and spectrograms.
//!
//! Symbol decisions are per-window single-bin energies (a Goertzel
//! recurrence, O(N) per candidate frequency and exactly the magnitude
//! squared of the DFT sum at that frequency). Synchronization slides an
//! eighth-of-a-symbol grid over the buffer and scores the alternating
//! preamble by the normalized margin between the expected carrier's energy
//! and the strongest other carrier, which makes the score invariant to
//! global amplitude scaling.
//!
//! `measure_snr` rates total power inside the carrier bands against total
//! power everywhere else below Nyquist; harmonics of the carriers are
//! excluded from the noise because the transmitter emits square waves, so
//! counting their energy as noise would systematically understate the SNR.

use crate::channel::AudioBuffer;
use crate::codec::{bytes_to_bits, Packet, Protocol, DEFAULT_PREAMBLE};
use crate::pattern::Bitmap;
use crate::spectrum::band_power_analysis;
use rustfft::{num_complex::Complex, FftPlanner};
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ReceiverError {
    #[error("window [{start}..{start}+{len}) exceeds buffer length {buf_len}")]
    WindowOutOfRange {
        start: usize,
        len: usize,
        buf_len: usize,
    },
    #[error("no transmission found (best sync score {best_score:.2}, threshold {threshold:.2})")]
    NoTransmission { best_score: f64, threshold: f64 },
    #[error("buffer too short for preamble search: need {needed} samples, got {got}")]
    BufferTooShort { needed: usize, got: usize },
    #[error("demodulator needs a power-of-two number (>= 2) of distinct carriers, got {0}")]
    BadAlphabet(usize),
    #[error("spectrogram needs window >= 16 and hop >= 1")]
    BadSpectrogramParams,
    #[error("buffer shorter than one spectrogram window")]
    BufferShorterThanWindow,
}

/// Receiver-side counterpart of [`crate::codec::ModemConfig`].
#[derive(Debug, Clone, PartialEq)]
pub struct DemodConfig {
    pub freqs: Vec<f64>,
    pub bit_duration: f64,
    /// Per-symbol energy ratio (dB) the preamble must clear on average for
    /// a sync to count as a transmission.
    pub decision_margin_db: f64,
    pub preamble: u8,
}

impl DemodConfig {
    pub fn new(freqs: Vec<f64>, bit_duration: f64) -> Result<Self, ReceiverError> {
        let m = freqs.len();
        if m < 2 || !m.is_power_of_two() {
            return Err(ReceiverError::BadAlphabet(m));
        }
        Ok(DemodConfig {
            freqs,
            bit_duration,
            decision_margin_db: 6.0,
            preamble: DEFAULT_PREAMBLE,
        })
    }

    pub fn from_modem(modem: &crate::codec::ModemConfig) -> Self {
        DemodConfig {
            freqs: modem.freqs.clone(),
            bit_duration: modem.bit_duration,
            decision_margin_db: 6.0,
            preamble: DEFAULT_PREAMBLE,
        }
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.freqs.len().trailing_zeros() as usize
    }

    pub fn symbol_duration(&self) -> f64 {
        self.bit_duration * self.bits_per_symbol() as f64
    }

    pub fn window_samples(&self, sample_rate: u32) -> usize {
        (self.symbol_duration() * sample_rate as f64).round() as usize
    }

    /// The preamble byte as a symbol-index sequence under this alphabet.
    fn preamble_symbols(&self) -> Vec<usize> {
        let bits = bytes_to_bits(&[self.preamble]);
        bits.chunks(self.bits_per_symbol())
            .map(|group| group.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize))
            .collect()
    }
}

/// Band halfwidth used for SNR bookkeeping when nothing else is specified:
/// ten symbol rates, wide enough that keying sidebands land in the signal
/// band instead of inflating the noise estimate.
pub fn default_band_halfwidth(symbol_duration: f64) -> f64 {
    10.0 / symbol_duration
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncInfo {
    pub offset: usize,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemodResult {
    pub bits: Vec<bool>,
    /// Checksum-valid packets only.
    pub packets: Vec<Packet>,
    /// Per-symbol tone energies, one row per symbol, one column per carrier.
    pub symbol_scores: Vec<Vec<f64>>,
    pub measured_snr_db: f64,
    pub sync_offset: usize,
}

fn goertzel_energy(samples: &[f64], freq: f64, sample_rate: u32) -> f64 {
    let w = TAU * freq / sample_rate as f64;
    let coeff = 2.0 * w.cos();
    let (mut q1, mut q2) = (0.0f64, 0.0f64);
    for &x in samples {
        let q0 = x + coeff * q1 - q2;
        q2 = q1;
        q1 = q0;
    }
    q1 * q1 + q2 * q2 - coeff * q1 * q2
}

/// Magnitude-squared response of a single-frequency detector over
/// `buf[start..start+len]`; equals the squared magnitude of the DFT sum at
/// `freq`.
pub fn tone_energy(
    buf: &AudioBuffer,
    freq: f64,
    start: usize,
    len: usize,
) -> Result<f64, ReceiverError> {
    if len == 0 || start + len > buf.samples.len() {
        return Err(ReceiverError::WindowOutOfRange {
            start,
            len,
            buf_len: buf.samples.len(),
        });
    }
    Ok(goertzel_energy(
        &buf.samples[start..start + len],
        freq,
        buf.sample_rate,
    ))
}

/// Normalized preamble score at one offset: for each preamble symbol, the
/// margin between the expected carrier's energy and the strongest other
/// carrier, normalized into [-1, 1] per symbol.
fn preamble_score(
    buf: &AudioBuffer,
    cfg: &DemodConfig,
    offset: usize,
    window: usize,
    pre_syms: &[usize],
) -> f64 {
    let mut total = 0.0;
    for (i, &sym) in pre_syms.iter().enumerate() {
        let start = offset + i * window;
        let samples = &buf.samples[start..start + window];
        let mut expected = 0.0;
        let mut other = f64::MIN;
        for (j, &f) in cfg.freqs.iter().enumerate() {
            let e = goertzel_energy(samples, f, buf.sample_rate);
            if j == sym {
                expected = e;
            } else if e > other {
                other = e;
            }
        }
        total += (expected - other) / (expected + other + f64::MIN_POSITIVE);
    }
    total
}

/// Sync candidates above the margin threshold, strongest first.
///
/// The alternating preamble aliases itself under whole-symbol shifts (six
/// of eight symbols still line up two symbols away, and a payload starting
/// `10` extends the alternation so a two-symbol-late lock scores a full
/// match), so the search cannot stop at the first qualifying offset: after
/// the first strong score it keeps scanning two more preamble spans, then
/// reduces the qualifying offsets to local maxima and ranks them. Late
/// aliases are rejected by an energy gate: a real packet start is preceded
/// by the inter-packet gap, while a shifted lock has a full-power symbol
/// right before it.
fn sync_candidates(buf: &AudioBuffer, cfg: &DemodConfig) -> Result<Vec<SyncInfo>, ReceiverError> {
    let window = cfg.window_samples(buf.sample_rate);
    let pre_syms = cfg.preamble_symbols();
    let span = window * pre_syms.len();
    if buf.samples.len() < span {
        return Err(ReceiverError::BufferTooShort {
            needed: span,
            got: buf.samples.len(),
        });
    }
    let step = (window / 8).max(1);
    let n_syms = pre_syms.len() as f64;
    let margin_ratio = {
        let r = 10f64.powf(cfg.decision_margin_db / 10.0);
        (r - 1.0) / (r + 1.0)
    };
    let threshold = n_syms * margin_ratio;
    let strong = 0.9 * n_syms;

    let mut scores: Vec<SyncInfo> = Vec::new();
    let mut best_score = f64::NEG_INFINITY;
    let mut offset = 0;
    let mut scan_until = usize::MAX;
    while offset + span <= buf.samples.len() && offset <= scan_until {
        let score = preamble_score(buf, cfg, offset, window, &pre_syms);
        scores.push(SyncInfo { offset, score });
        if score >= strong && scan_until == usize::MAX {
            scan_until = offset + 2 * span;
        }
        best_score = best_score.max(score);
        offset += step;
    }
    if best_score < threshold {
        return Err(ReceiverError::NoTransmission {
            best_score,
            threshold,
        });
    }
    // Local maxima over a one-window neighborhood, qualifying scores only.
    let radius = (window / step).max(1);
    let mut peaks: Vec<SyncInfo> = Vec::new();
    for (i, s) in scores.iter().enumerate() {
        if s.score < threshold {
            continue;
        }
        let lo = i.saturating_sub(radius);
        let hi = (i + radius).min(scores.len() - 1);
        let is_peak = scores[lo..=hi].iter().all(|o| o.score <= s.score);
        if is_peak {
            peaks.push(*s);
        }
    }
    // Gate: the window before a genuine packet start holds gap noise, not
    // a full-power symbol. Keep gated peaks when any survive.
    let gated: Vec<SyncInfo> = peaks
        .iter()
        .copied()
        .filter(|p| {
            if p.offset < window {
                return true;
            }
            let pre = mean_square(&buf.samples[p.offset - window..p.offset]);
            let sym = mean_square(&buf.samples[p.offset..p.offset + span]);
            pre <= 0.5 * sym
        })
        .collect();
    let mut candidates = if gated.is_empty() { peaks } else { gated };
    candidates.sort_by(|a, b| b.score.partial_cmp(&a.score).unwrap());
    candidates.truncate(8);
    Ok(candidates)
}

fn mean_square(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().map(|x| x * x).sum::<f64>() / samples.len() as f64
}

/// Slides a symbol-grid hypothesis over the buffer in window/8 steps and
/// returns the offset with the best preamble score, provided it clears the
/// margin threshold.
pub fn find_preamble(buf: &AudioBuffer, cfg: &DemodConfig) -> Result<SyncInfo, ReceiverError> {
    Ok(sync_candidates(buf, cfg)?[0])
}

/// Demodulates from a known symbol-grid offset: argmax tone energy per
/// window, bits concatenated MSB-first per symbol, packets recovered at
/// every preamble hit in the bit stream.
pub fn demodulate_at(buf: &AudioBuffer, cfg: &DemodConfig, offset: usize) -> DemodResult {
    let window = cfg.window_samples(buf.sample_rate);
    let bps = cfg.bits_per_symbol();
    let mut bits = Vec::new();
    let mut symbol_scores = Vec::new();
    let mut start = offset;
    while start + window <= buf.samples.len() {
        let samples = &buf.samples[start..start + window];
        let energies: Vec<f64> = cfg
            .freqs
            .iter()
            .map(|&f| goertzel_energy(samples, f, buf.sample_rate))
            .collect();
        let sym = energies
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        for b in (0..bps).rev() {
            bits.push((sym >> b) & 1 == 1);
        }
        symbol_scores.push(energies);
        start += window;
    }
    let protocol = Protocol {
        preamble: cfg.preamble,
    };
    let packets = protocol.scan(&bits).into_iter().map(|(_, p)| p).collect();
    let measured_snr_db = measure_snr(
        buf,
        &cfg.freqs,
        default_band_halfwidth(cfg.symbol_duration()),
    );
    DemodResult {
        bits,
        packets,
        symbol_scores,
        measured_snr_db,
        sync_offset: offset,
    }
}

/// Preamble sync plus [`demodulate_at`]. Sync candidates are tried
/// strongest first until one yields a checksum-valid packet; a shift-aliased
/// lock decodes no valid packet and falls through to the true alignment.
/// When no candidate validates, the strongest one's result is returned with
/// `packets` empty and the raw bits still available to the caller.
pub fn demodulate(buf: &AudioBuffer, cfg: &DemodConfig) -> Result<DemodResult, ReceiverError> {
    let candidates = sync_candidates(buf, cfg)?;
    let mut fallback: Option<DemodResult> = None;
    for c in &candidates {
        let result = demodulate_at(buf, cfg, c.offset);
        if !result.packets.is_empty() {
            return Ok(result);
        }
        if fallback.is_none() {
            fallback = Some(result);
        }
    }
    Ok(fallback.expect("candidates is non-empty"))
}

/// SNR in dB: total power within `band_halfwidth` of the carriers over
/// total power elsewhere below Nyquist, with carrier harmonics excluded
/// from the noise. Returns infinity when the noise floor is at the
/// floating-point residue level (a noiseless synthetic buffer).
pub fn measure_snr(buf: &AudioBuffer, signal_freqs: &[f64], band_halfwidth: f64) -> f64 {
    let a = band_power_analysis(&buf.samples, buf.sample_rate, signal_freqs, band_halfwidth);
    if a.noise_bins == 0 || a.noise_power <= 1e-20 * a.signal_power {
        return f64::INFINITY;
    }
    10.0 * (a.signal_power / a.noise_power).log10()
}

/// Short-time Fourier magnitudes, one row per frame, `window/2 + 1`
/// frequency bins per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    pub frames: usize,
    pub bins: usize,
    pub data: Vec<f64>,
    pub sample_rate: u32,
    pub window: usize,
    pub hop: usize,
}

impl Spectrogram {
    pub fn magnitude(&self, frame: usize, bin: usize) -> f64 {
        self.data[frame * self.bins + bin]
    }

    pub fn bin_hz(&self) -> f64 {
        self.sample_rate as f64 / self.window as f64
    }

    /// CSV with one row per frame; the header row carries bin center
    /// frequencies.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = (0..self.bins)
            .map(|b| format!("{:.2}", b as f64 * self.bin_hz()))
            .collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for f in 0..self.frames {
            let row: Vec<String> = (0..self.bins)
                .map(|b| format!("{:.6e}", self.magnitude(f, b)))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Grayscale rendering, dB-scaled over an 80 dB range: rows are time
    /// frames (top first), columns are frequency bins.
    pub fn to_bitmap(&self) -> Bitmap {
        let max = self.data.iter().cloned().fold(0.0f64, f64::max);
        let floor_db = -80.0;
        let pixels = self
            .data
            .iter()
            .map(|&m| {
                if max <= 0.0 || m <= 0.0 {
                    return 0u8;
                }
                let db = 20.0 * (m / max).log10();
                let t = ((db - floor_db) / -floor_db).clamp(0.0, 1.0);
                (t * 255.0).round() as u8
            })
            .collect();
        Bitmap {
            width: self.bins as u32,
            height: self.frames as u32,
            pixels,
        }
    }
}

pub fn spectrogram(
    buf: &AudioBuffer,
    window: usize,
    hop: usize,
) -> Result<Spectrogram, ReceiverError> {
    if window < 16 || hop < 1 {
        return Err(ReceiverError::BadSpectrogramParams);
    }
    if buf.samples.len() < window {
        return Err(ReceiverError::BufferShorterThanWindow);
    }
    let frames = (buf.samples.len() - window) / hop + 1;
    let bins = window / 2 + 1;
    let fft = FftPlanner::new().plan_fft_forward(window);
    let mut data = Vec::with_capacity(frames * bins);
    let mut scratch = vec![Complex::new(0.0, 0.0); window];
    for f in 0..frames {
        let start = f * hop;
        for (i, s) in scratch.iter_mut().enumerate() {
            *s = Complex::new(buf.samples[start + i], 0.0);
        }
        fft.process(&mut scratch);
        data.extend(scratch[..bins].iter().map(|c| c.norm() / window as f64));
    }
    Ok(Spectrogram {
        frames,
        bins,
        data,
        sample_rate: buf.sample_rate,
        window,
        hop,
    })
}
