//! Minimal line plots rendered to graymaps: white polyline and axes on
//! black, enough to eyeball a sweep without pulling in a plotting stack.

use pixtone_core::pattern::Bitmap;

const W: u32 = 640;
const H: u32 = 320;
const MARGIN: u32 = 24;

pub fn plot_series(points: &[(f64, f64)]) -> Bitmap {
    let mut bmp = Bitmap::new(W, H, 0);
    for x in MARGIN..W - MARGIN {
        bmp.set(x, H - MARGIN, 96);
        bmp.set(x, MARGIN, 32);
    }
    for y in MARGIN..H - MARGIN {
        bmp.set(MARGIN, y, 96);
        bmp.set(W - MARGIN, y, 32);
    }
    if points.is_empty() {
        return bmp;
    }
    let (mut x_min, mut x_max) = (f64::MAX, f64::MIN);
    let (mut y_min, mut y_max) = (f64::MAX, f64::MIN);
    for &(x, y) in points {
        x_min = x_min.min(x);
        x_max = x_max.max(x);
        y_min = y_min.min(y);
        y_max = y_max.max(y);
    }
    let x_span = (x_max - x_min).max(f64::MIN_POSITIVE);
    let y_span = (y_max - y_min).max(f64::MIN_POSITIVE);
    let to_px = |x: f64, y: f64| -> (i64, i64) {
        let px = MARGIN as f64 + (x - x_min) / x_span * (W - 2 * MARGIN) as f64;
        let py = (H - MARGIN) as f64 - (y - y_min) / y_span * (H - 2 * MARGIN) as f64;
        (px.round() as i64, py.round() as i64)
    };
    for pair in points.windows(2) {
        let (x0, y0) = to_px(pair[0].0, pair[0].1);
        let (x1, y1) = to_px(pair[1].0, pair[1].1);
        draw_line(&mut bmp, x0, y0, x1, y1);
    }
    for &(x, y) in points {
        let (px, py) = to_px(x, y);
        for dx in -1..=1i64 {
            for dy in -1..=1i64 {
                put(&mut bmp, px + dx, py + dy, 255);
            }
        }
    }
    bmp
}

fn put(bmp: &mut Bitmap, x: i64, y: i64, v: u8) {
    if x >= 0 && y >= 0 && (x as u32) < bmp.width && (y as u32) < bmp.height {
        bmp.set(x as u32, y as u32, v);
    }
}

fn draw_line(bmp: &mut Bitmap, mut x0: i64, mut y0: i64, x1: i64, y1: i64) {
    let dx = (x1 - x0).abs();
    let dy = -(y1 - y0).abs();
    let sx = if x0 < x1 { 1 } else { -1 };
    let sy = if y0 < y1 { 1 } else { -1 };
    let mut err = dx + dy;
    loop {
        put(bmp, x0, y0, 200);
        if x0 == x1 && y0 == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x0 += sx;
        }
        if e2 <= dx {
            err += dx;
            y0 += sy;
        }
    }
}
