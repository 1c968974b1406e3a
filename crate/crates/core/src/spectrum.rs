//! Power-spectrum partitioning shared by noise injection and SNR
//! measurement.
//!
//! A buffer's spectrum is split into three regions: signal bands (within
//! `band_halfwidth` of a carrier), harmonic bands (within `band_halfwidth`
//! of an integer multiple >= 2 of a carrier; the transmitter emits square
//! waves, so those bins carry signal energy, not noise), and everything
//! else, which counts as noise. DC is left out entirely. Both
//! `channel::add_noise` and `receiver::measure_snr` rate buffers through
//! this one partition, which is what makes the injected and measured SNR
//! agree.

use rustfft::{num_complex::Complex, FftPlanner};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandAnalysis {
    /// Mean-square power inside the signal bands.
    pub signal_power: f64,
    /// Mean-square power inside harmonic bands.
    pub harmonic_power: f64,
    /// Mean-square power everywhere else below Nyquist, DC excluded.
    pub noise_power: f64,
    pub signal_bins: usize,
    pub harmonic_bins: usize,
    pub noise_bins: usize,
    pub total_bins: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BinClass {
    Dc,
    Signal,
    Harmonic,
    Noise,
}

fn classify(freq: f64, signal_freqs: &[f64], band_halfwidth: f64) -> BinClass {
    let mut harmonic = false;
    for &f in signal_freqs {
        if f <= 0.0 {
            continue;
        }
        let k = (freq / f).round();
        if k >= 1.0 && (freq - k * f).abs() <= band_halfwidth {
            if k == 1.0 {
                return BinClass::Signal;
            }
            harmonic = true;
        }
    }
    if harmonic {
        BinClass::Harmonic
    } else {
        BinClass::Noise
    }
}

/// Full-buffer FFT power partition. `signal_freqs` lists the carrier
/// fundamentals; anything within `band_halfwidth` of them (or of their
/// harmonics) is pulled out of the noise estimate.
pub fn band_power_analysis(
    samples: &[f64],
    sample_rate: u32,
    signal_freqs: &[f64],
    band_halfwidth: f64,
) -> BandAnalysis {
    let n = samples.len();
    assert!(n > 1, "band analysis needs at least two samples");
    let mut buf: Vec<Complex<f64>> = samples.iter().map(|&x| Complex::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let bin_hz = sample_rate as f64 / n as f64;
    let norm = (n as f64) * (n as f64);
    let mut out = BandAnalysis {
        signal_power: 0.0,
        harmonic_power: 0.0,
        noise_power: 0.0,
        signal_bins: 0,
        harmonic_bins: 0,
        noise_bins: 0,
        total_bins: n,
    };
    for (k, x) in buf.iter().enumerate() {
        // Mirror bins above N/2 map to negative frequencies.
        let freq = k.min(n - k) as f64 * bin_hz;
        let class = if k == 0 {
            BinClass::Dc
        } else {
            classify(freq, signal_freqs, band_halfwidth)
        };
        let p = x.norm_sqr() / norm;
        match class {
            BinClass::Dc => {}
            BinClass::Signal => {
                out.signal_power += p;
                out.signal_bins += 1;
            }
            BinClass::Harmonic => {
                out.harmonic_power += p;
                out.harmonic_bins += 1;
            }
            BinClass::Noise => {
                out.noise_power += p;
                out.noise_bins += 1;
            }
        }
    }
    out
}
