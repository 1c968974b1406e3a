//! Key-value config file: `key = value` lines, `#` comments.
//!
//! Recognized keys: `preset`, `width`, `height`, `refresh`, `h_blank`,
//! `v_blank`, `beta`, `preamble`, `sample_rate`, `base_amplitude`.
//! Command-line flags always win over file values.

use crate::errors::{coded, EXIT_USAGE};
use anyhow::Result;
use pixtone_core::display::{Blanking, DisplayConfig};
use std::path::Path;

#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    pub preset: Option<String>,
    pub width: Option<u32>,
    pub height: Option<u32>,
    pub refresh: Option<u32>,
    pub h_blank: Option<u32>,
    pub v_blank: Option<u32>,
    pub beta: Option<f64>,
    pub preamble: Option<u8>,
    pub sample_rate: Option<u32>,
    pub base_amplitude: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| {
            coded(
                EXIT_USAGE,
                format!("cannot read config {}: {e}", path.display()),
            )
        })?;
        Self::parse(&text).map_err(|e| coded(EXIT_USAGE, format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut cfg = FileConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`", i + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| format!("line {}: invalid {what} `{value}`", i + 1);
            match key {
                "preset" => cfg.preset = Some(value.to_string()),
                "width" => cfg.width = Some(value.parse().map_err(|_| bad("width"))?),
                "height" => cfg.height = Some(value.parse().map_err(|_| bad("height"))?),
                "refresh" => cfg.refresh = Some(value.parse().map_err(|_| bad("refresh"))?),
                "h_blank" => cfg.h_blank = Some(value.parse().map_err(|_| bad("h_blank"))?),
                "v_blank" => cfg.v_blank = Some(value.parse().map_err(|_| bad("v_blank"))?),
                "beta" => cfg.beta = Some(value.parse().map_err(|_| bad("beta"))?),
                "preamble" => {
                    cfg.preamble = Some(parse_byte(value).ok_or_else(|| bad("preamble"))?)
                }
                "sample_rate" => {
                    cfg.sample_rate = Some(value.parse().map_err(|_| bad("sample_rate"))?)
                }
                "base_amplitude" => {
                    cfg.base_amplitude = Some(value.parse().map_err(|_| bad("base_amplitude"))?)
                }
                other => return Err(format!("line {}: unknown key `{other}`", i + 1)),
            }
        }
        Ok(cfg)
    }
}

fn parse_byte(s: &str) -> Option<u8> {
    if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        u8::from_str_radix(hex, 16).ok()
    } else if let Some(bin) = s.strip_prefix("0b").or_else(|| s.strip_prefix("0B")) {
        u8::from_str_radix(bin, 2).ok()
    } else {
        s.parse().ok()
    }
}

/// Resolves the display from CLI flags over config-file values. A preset
/// fills everything the flags leave unset.
pub struct DisplayArgs {
    pub preset: Option<String>,
    pub width: Option<u32>,
    pub height: Option<u32>,
    pub refresh: Option<u32>,
    pub h_blank: Option<u32>,
    pub v_blank: Option<u32>,
    pub beta: Option<f64>,
}

pub fn resolve_display(args: &DisplayArgs, file: &FileConfig) -> Result<DisplayConfig> {
    let preset = args.preset.clone().or_else(|| file.preset.clone());
    let base = match preset {
        Some(name) => {
            Some(DisplayConfig::preset(&name).map_err(|e| coded(EXIT_USAGE, e.to_string()))?)
        }
        None => None,
    };
    let width = args.width.or(file.width).or(base.map(|b| b.width));
    let height = args.height.or(file.height).or(base.map(|b| b.height));
    let refresh = args.refresh.or(file.refresh).or(base.map(|b| b.refresh_hz));
    let (width, height, refresh) = match (width, height, refresh) {
        (Some(w), Some(h), Some(r)) => (w, h, r),
        _ => {
            return Err(coded(
                EXIT_USAGE,
                "display timing incomplete: give --preset or --width/--height/--refresh",
            ))
        }
    };
    let beta = args.beta.or(file.beta);
    let h_blank = args.h_blank.or(file.h_blank);
    let v_blank = args.v_blank.or(file.v_blank);
    let blanking = match (beta, h_blank, v_blank) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            return Err(coded(
                EXIT_USAGE,
                "give either --beta or --h-blank/--v-blank, not both",
            ))
        }
        (Some(b), None, None) => Blanking::Ratio(b),
        (None, hb, vb) => match base.map(|b| b.blanking) {
            // Explicit flags override the preset's blanking field by field.
            Some(Blanking::Explicit {
                h_blank: ph,
                v_blank: pv,
            }) => Blanking::Explicit {
                h_blank: hb.unwrap_or(ph),
                v_blank: vb.unwrap_or(pv),
            },
            Some(Blanking::Ratio(b)) if hb.is_none() && vb.is_none() => Blanking::Ratio(b),
            _ => Blanking::Explicit {
                h_blank: hb.unwrap_or(0),
                v_blank: vb.unwrap_or(0),
            },
        },
    };
    DisplayConfig::new(width, height, refresh, blanking)
        .map_err(|e| coded(EXIT_USAGE, e.to_string()))
}
