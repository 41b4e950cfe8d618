//! Minimal raster plot of precision/recall curves.

use super::PrPoint;
use crate::imaging::RgbImage;

const MARGIN: usize = 30;

fn line(img: &mut RgbImage, (x0, y0): (i64, i64), (x1, y1): (i64, i64), rgb: [u8; 3]) {
    let (dx, dy) = ((x1 - x0).abs(), -(y1 - y0).abs());
    let (sx, sy) = (if x0 < x1 { 1 } else { -1 }, if y0 < y1 { 1 } else { -1 });
    let (mut x, mut y, mut err) = (x0, y0, dx + dy);
    loop {
        img.put_clipped(x, y, rgb);
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

/// Square plot, recall on x and precision on y, both over `[0, 1]`. Curves
/// are drawn in order, so later ones sit on top.
pub fn render_pr_plot(curves: &[(&[PrPoint], [u8; 3])], size: usize) -> RgbImage {
    let size = size.max(2 * MARGIN + 10);
    let mut img = RgbImage::filled(size, size, [255, 255, 255]).expect("non-empty");
    let span = (size - 2 * MARGIN) as f64;
    let to_px = |recall: f64, precision: f64| {
        let x = MARGIN as f64 + recall.clamp(0.0, 1.0) * span;
        let y = (size - MARGIN) as f64 - precision.clamp(0.0, 1.0) * span;
        (x.round() as i64, y.round() as i64)
    };
    let gray = [200, 200, 200];
    for k in 1..10 {
        let t = k as f64 / 10.0;
        line(&mut img, to_px(t, 0.0), to_px(t, 1.0), gray);
        line(&mut img, to_px(0.0, t), to_px(1.0, t), gray);
    }
    let black = [0, 0, 0];
    for (a, b) in [((0.0, 0.0), (1.0, 0.0)), ((0.0, 0.0), (0.0, 1.0)), ((1.0, 0.0), (1.0, 1.0)), ((0.0, 1.0), (1.0, 1.0))] {
        line(&mut img, to_px(a.0, a.1), to_px(b.0, b.1), black);
    }
    for (points, rgb) in curves {
        for w in points.windows(2) {
            line(&mut img, to_px(w[0].recall, w[0].precision), to_px(w[1].recall, w[1].precision), *rgb);
        }
    }
    img
}
