//! Binary PPM heatmaps of the normalized total cost with path overlays.

use crate::cost::State;
use crate::error::{Error, Result};
use crate::maps::{normalize_total, MetricMapSet};

const OBSTACLE: [u8; 3] = [30, 30, 30];
const PATH_COLORS: [[u8; 3]; 5] = [[255, 255, 255], [230, 25, 75], [60, 180, 75], [0, 130, 200], [245, 130, 48]];

/// Blue (cheap) through yellow to red (expensive).
fn ramp(t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0);
    let (r, g, b) = if t < 0.5 {
        let s = t * 2.0;
        (s, s, 1.0 - s)
    } else {
        let s = (t - 0.5) * 2.0;
        (1.0, 1.0 - s, 0.0)
    };
    [(r * 255.0).round() as u8, (g * 255.0).round() as u8, (b * 255.0).round() as u8]
}

/// `scale` pixels per cell, north up. Paths are drawn in a fixed palette in
/// the order given.
pub fn render_ppm(maps: &MetricMapSet, paths: &[Vec<State>], scale: usize) -> Result<Vec<u8>> {
    if scale == 0 {
        return Err(Error::Precondition("scale must be at least 1".into()));
    }
    let spec = maps.spec();
    let norm = normalize_total(maps);
    let (w, h) = (spec.n_cols * scale, spec.n_rows * scale);
    let mut px = vec![0u8; w * h * 3];
    let mut put = |x: usize, y: usize, c: [u8; 3]| {
        let i = (y * w + x) * 3;
        px[i..i + 3].copy_from_slice(&c);
    };
    for cell in spec.cells() {
        let color = if maps.is_free(cell) { ramp(norm.get(cell)) } else { OBSTACLE };
        let top = (spec.n_rows - 1 - cell.row) * scale;
        for dy in 0..scale {
            for dx in 0..scale {
                put(cell.col * scale + dx, top + dy, color);
            }
        }
    }
    let to_px = |s: &State| {
        let x = (s.x - spec.bbox.x_min) / spec.resolution * scale as f64;
        let y = (spec.bbox.y_max - s.y) / spec.resolution * scale as f64;
        (x, y)
    };
    for (k, path) in paths.iter().enumerate() {
        let color = PATH_COLORS[k % PATH_COLORS.len()];
        for seg in path.windows(2) {
            let (x0, y0) = to_px(&seg[0]);
            let (x1, y1) = to_px(&seg[1]);
            let steps = ((x1 - x0).abs().max((y1 - y0).abs()).ceil() as usize).max(1) * 2;
            for i in 0..=steps {
                let t = i as f64 / steps as f64;
                let (x, y) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
                if x >= 0.0 && y >= 0.0 && (x as usize) < w && (y as usize) < h {
                    put(x as usize, y as usize, color);
                }
            }
        }
    }
    let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
    out.extend(px);
    Ok(out)
}
