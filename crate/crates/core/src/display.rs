//! Display timing: the pixel clocks that set every pattern's spatial frequency.
//!
//! A display drives `width x height` visible pixels `refresh_rate` times a
//! second, plus blanking overhead (retrace pixels that are clocked out but
//! never shown). The pixel clock is the product of the per-frame pixel count
//! and the refresh rate; blanking can be given either as explicit horizontal
//! and vertical trace pixels or as an overhead ratio. All products are
//! computed in integer arithmetic where the inputs allow it, so downstream
//! cycle-size math is reproducible bit for bit.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DisplayError {
    #[error("display dimensions must be at least 1x1, got {width}x{height}")]
    BadDimensions { width: u32, height: u32 },
    #[error("refresh rate must be positive")]
    BadRefreshRate,
    #[error("blanking ratio must be non-negative, got {0}")]
    BadBlankingRatio(f64),
    #[error("unknown display preset `{0}`")]
    UnknownPreset(String),
}

/// Blanking overhead, in exactly one of the two forms the timing math uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Blanking {
    /// Explicit horizontal trace pixels per row and vertical trace rows per
    /// frame (e.g. 280 and 45 for CEA 1080p60, total 2200x1125).
    Explicit { h_blank: u32, v_blank: u32 },
    /// Overhead as a fraction of the visible pixel count (often ~0.1).
    Ratio(f64),
}

impl Blanking {
    pub const NONE: Blanking = Blanking::Explicit {
        h_blank: 0,
        v_blank: 0,
    };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplayConfig {
    pub width: u32,
    pub height: u32,
    pub refresh_hz: u32,
    pub blanking: Blanking,
}

impl DisplayConfig {
    pub fn new(
        width: u32,
        height: u32,
        refresh_hz: u32,
        blanking: Blanking,
    ) -> Result<Self, DisplayError> {
        if width == 0 || height == 0 {
            return Err(DisplayError::BadDimensions { width, height });
        }
        if refresh_hz == 0 {
            return Err(DisplayError::BadRefreshRate);
        }
        if let Blanking::Ratio(beta) = blanking {
            if !beta.is_finite() || beta < 0.0 {
                return Err(DisplayError::BadBlankingRatio(beta));
            }
        }
        Ok(DisplayConfig {
            width,
            height,
            refresh_hz,
            blanking,
        })
    }

    /// Named timings used throughout the tooling.
    pub fn preset(name: &str) -> Result<Self, DisplayError> {
        match name {
            // CEA-861 1080p60: 2200x1125 total, 148.5 MHz.
            "1080p60-cea" => Self::new(
                1920,
                1080,
                60,
                Blanking::Explicit {
                    h_blank: 280,
                    v_blank: 45,
                },
            ),
            "1080p60" => Self::new(1920, 1080, 60, Blanking::NONE),
            "720p60" => Self::new(1280, 720, 60, Blanking::NONE),
            "1680x1050@60" => Self::new(1680, 1050, 60, Blanking::NONE),
            other => Err(DisplayError::UnknownPreset(other.to_string())),
        }
    }

    pub fn visible_pixels(&self) -> u64 {
        self.width as u64 * self.height as u64
    }

    /// Total pixels per frame including blanking. Exact only in explicit
    /// mode; in ratio mode the overhead is a real-valued scale factor.
    pub fn total_pixels(&self) -> f64 {
        match self.blanking {
            Blanking::Explicit { h_blank, v_blank } => {
                ((self.width + h_blank) as u64 * (self.height + v_blank) as u64) as f64
            }
            Blanking::Ratio(beta) => self.visible_pixels() as f64 * (1.0 + beta),
        }
    }

    /// Pixel clock over the visible area only: width x height x refresh.
    pub fn nominal_pixel_clock(&self) -> u64 {
        self.visible_pixels() * self.refresh_hz as u64
    }

    /// Pixel clock including blanking overhead.
    ///
    /// Explicit mode: (width + h_blank) x (height + v_blank) x refresh, an
    /// exact integer. Ratio mode: width x height x refresh x (1 + beta).
    pub fn effective_pixel_clock(&self) -> f64 {
        match self.blanking {
            Blanking::Explicit { h_blank, v_blank } => {
                ((self.width + h_blank) as u64
                    * (self.height + v_blank) as u64
                    * self.refresh_hz as u64) as f64
            }
            Blanking::Ratio(beta) => self.nominal_pixel_clock() as f64 * (1.0 + beta),
        }
    }

    /// Fraction of the frame's pixel slots that are visible, in (0, 1].
    /// Maps per-frame sample counts between the active area and total frame
    /// time; equals 1 with zero blanking.
    pub fn visible_pixel_fraction(&self) -> f64 {
        self.visible_pixels() as f64 / self.total_pixels()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn explicit(w: u32, h: u32, r: u32, hb: u32, vb: u32) -> DisplayConfig {
        DisplayConfig::new(
            w,
            h,
            r,
            Blanking::Explicit {
                h_blank: hb,
                v_blank: vb,
            },
        )
        .unwrap()
    }

    #[test]
    fn nominal_clock_direct_products() {
        assert_eq!(
            explicit(1920, 1080, 60, 0, 0).nominal_pixel_clock(),
            124_416_000
        );
        assert_eq!(explicit(1, 1, 60, 0, 0).nominal_pixel_clock(), 60);
        assert_eq!(
            explicit(1280, 720, 60, 0, 0).nominal_pixel_clock(),
            55_296_000
        );
    }

    #[test]
    fn effective_clock_cea_1080p60_is_148_5_mhz() {
        let cfg = explicit(1920, 1080, 60, 280, 45);
        assert_eq!(cfg.effective_pixel_clock(), 148_500_000.0);
        assert_eq!(cfg.effective_pixel_clock() as u64, 148_500_000);
    }

    #[test]
    fn effective_clock_ratio_mode() {
        let cfg = DisplayConfig::new(1920, 1080, 60, Blanking::Ratio(0.1)).unwrap();
        let expect = 136_857_600.0;
        assert!((cfg.effective_pixel_clock() - expect).abs() / expect < 1e-12);
    }

    #[test]
    fn effective_clock_degenerates_to_nominal_without_blanking() {
        let cfg = explicit(1920, 1080, 60, 0, 0);
        assert_eq!(
            cfg.effective_pixel_clock(),
            cfg.nominal_pixel_clock() as f64
        );
    }

    #[test]
    fn visible_fraction_examples() {
        let cea = explicit(1920, 1080, 60, 280, 45);
        // 2,073,600 / 2,475,000
        assert!((cea.visible_pixel_fraction() - 2_073_600.0 / 2_475_000.0).abs() < 1e-15);
        assert_eq!(explicit(640, 480, 75, 0, 0).visible_pixel_fraction(), 1.0);
        let ratio = DisplayConfig::new(1920, 1080, 60, Blanking::Ratio(0.1)).unwrap();
        assert!((ratio.visible_pixel_fraction() - 1.0 / 1.1).abs() < 1e-12);
    }

    #[test]
    fn frame_time_reconstruction_explicit_mode() {
        // P_total / effective clock = 1 / refresh, exactly.
        let cfg = explicit(1920, 1080, 60, 280, 45);
        let frame_s = cfg.total_pixels() / cfg.effective_pixel_clock();
        assert_eq!(frame_s, 1.0 / 60.0);
    }

    #[test]
    fn preset_lookup() {
        let cea = DisplayConfig::preset("1080p60-cea").unwrap();
        assert_eq!(cea.effective_pixel_clock() as u64, 148_500_000);
        assert_eq!(
            DisplayConfig::preset("720p60")
                .unwrap()
                .nominal_pixel_clock(),
            55_296_000
        );
        assert_eq!(
            DisplayConfig::preset("1680x1050@60")
                .unwrap()
                .nominal_pixel_clock(),
            105_840_000
        );
        assert!(matches!(
            DisplayConfig::preset("vga"),
            Err(DisplayError::UnknownPreset(_))
        ));
    }

    #[test]
    fn rejects_invalid_configs() {
        assert!(DisplayConfig::new(0, 1080, 60, Blanking::NONE).is_err());
        assert!(DisplayConfig::new(1920, 0, 60, Blanking::NONE).is_err());
        assert!(DisplayConfig::new(1920, 1080, 0, Blanking::NONE).is_err());
        assert!(DisplayConfig::new(1920, 1080, 60, Blanking::Ratio(-0.1)).is_err());
        assert!(DisplayConfig::new(1920, 1080, 60, Blanking::Ratio(f64::NAN)).is_err());
    }

    proptest! {
        // Effective clock never drops below nominal; equality iff no blanking.
        #[test]
        fn effective_dominates_nominal(
            w in 1u32..4096, h in 1u32..4096, r in 1u32..360,
            hb in 0u32..600, vb in 0u32..200,
        ) {
            let cfg = explicit(w, h, r, hb, vb);
            let nominal = cfg.nominal_pixel_clock() as f64;
            let effective = cfg.effective_pixel_clock();
            prop_assert!(effective >= nominal);
            prop_assert_eq!(effective == nominal, hb == 0 && vb == 0);
        }

        // Strict monotonicity in each parameter, others fixed.
        #[test]
        fn effective_clock_monotone(
            w in 1u32..2048, h in 1u32..2048, r in 1u32..240,
            hb in 0u32..500, vb in 0u32..100,
        ) {
            let base = explicit(w, h, r, hb, vb).effective_pixel_clock();
            prop_assert!(explicit(w + 1, h, r, hb, vb).effective_pixel_clock() > base);
            prop_assert!(explicit(w, h + 1, r, hb, vb).effective_pixel_clock() > base);
            prop_assert!(explicit(w, h, r + 1, hb, vb).effective_pixel_clock() > base);
            prop_assert!(explicit(w, h, r, hb + 1, vb).effective_pixel_clock() > base);
            prop_assert!(explicit(w, h, r, hb, vb + 1).effective_pixel_clock() > base);
        }

        #[test]
        fn ratio_mode_monotone_in_beta(beta in 0.0f64..2.0) {
            let lo = DisplayConfig::new(1920, 1080, 60, Blanking::Ratio(beta)).unwrap();
            let hi = DisplayConfig::new(1920, 1080, 60, Blanking::Ratio(beta + 0.01)).unwrap();
            prop_assert!(hi.effective_pixel_clock() > lo.effective_pixel_clock());
        }
    }
}
