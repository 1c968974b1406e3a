//! Binary portable graymap (P5, maxval 255) import and export for bitmaps.

use crate::pattern::Bitmap;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PgmError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("not a binary graymap (expected magic P5)")]
    BadMagic,
    #[error("malformed header field: {0}")]
    BadHeader(String),
    #[error("unsupported maxval {0} (only 255)")]
    UnsupportedMaxval(u32),
    #[error("pixel data truncated: expected {expected} bytes, got {got}")]
    Truncated { expected: usize, got: usize },
}

pub fn write_pgm<W: Write>(bmp: &Bitmap, mut w: W) -> Result<(), PgmError> {
    write!(w, "P5\n{} {}\n255\n", bmp.width, bmp.height)?;
    w.write_all(&bmp.pixels)?;
    Ok(())
}

pub fn write_pgm_file<P: AsRef<Path>>(bmp: &Bitmap, path: P) -> Result<(), PgmError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_pgm(bmp, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_pgm<R: Read>(mut r: R) -> Result<Bitmap, PgmError> {
    let mut data = Vec::new();
    r.read_to_end(&mut data)?;
    if data.len() < 2 || &data[0..2] != b"P5" {
        return Err(PgmError::BadMagic);
    }
    let mut pos = 2;
    let width = read_header_int(&data, &mut pos)?;
    let height = read_header_int(&data, &mut pos)?;
    let maxval = read_header_int(&data, &mut pos)?;
    if maxval != 255 {
        return Err(PgmError::UnsupportedMaxval(maxval));
    }
    // Exactly one whitespace byte separates the header from the raster.
    pos += 1;
    let expected = width as usize * height as usize;
    let raster = &data[pos.min(data.len())..];
    if raster.len() < expected {
        return Err(PgmError::Truncated {
            expected,
            got: raster.len(),
        });
    }
    Ok(Bitmap {
        width,
        height,
        pixels: raster[..expected].to_vec(),
    })
}

pub fn read_pgm_file<P: AsRef<Path>>(path: P) -> Result<Bitmap, PgmError> {
    read_pgm(BufReader::new(File::open(path)?))
}

/// Reads the next ASCII integer, skipping whitespace and `#` comments.
fn read_header_int(data: &[u8], pos: &mut usize) -> Result<u32, PgmError> {
    loop {
        while *pos < data.len() && data[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < data.len() && data[*pos] == b'#' {
            while *pos < data.len() && data[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < data.len() && data[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if *pos == start {
        return Err(PgmError::BadHeader(
            String::from_utf8_lossy(&data[start..(start + 8).min(data.len())]).into_owned(),
        ));
    }
    std::str::from_utf8(&data[start..*pos])
        .unwrap()
        .parse()
        .map_err(|_| PgmError::BadHeader("integer out of range".into()))
}
