//! Exact Euclidean distance transform (separable lower-envelope method of
//! Felzenszwalb and Huttenlocher) on cell centers.

use super::grid::GridLayer;

/// 1-D squared distance transform of `f` (in cell units) into `out`.
/// Infinite samples are skipped when building the lower envelope.
fn edt_1d(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let mut k: Option<usize> = None;
    for (q, &fq) in f.iter().enumerate() {
        if fq.is_infinite() {
            continue;
        }
        let Some(mut top) = k else {
            v[0] = q;
            z[0] = f64::NEG_INFINITY;
            z[1] = f64::INFINITY;
            k = Some(0);
            continue;
        };
        loop {
            let p = v[top];
            let s = ((fq + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q - p) as f64);
            // z[0] is -inf so the first parabola is never popped
            if s <= z[top] {
                top -= 1;
                continue;
            }
            top += 1;
            v[top] = q;
            z[top] = s;
            z[top + 1] = f64::INFINITY;
            break;
        }
        k = Some(top);
    }
    if k.is_none() {
        out.fill(f64::INFINITY);
        return;
    }
    let mut j = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[j + 1] < q as f64 {
            j += 1;
        }
        let d = q as f64 - v[j] as f64;
        *o = d * d + f[v[j]];
    }
}

/// Distance in meters from each cell center to the nearest occupied cell
/// center (value > 0). Occupied cells hold 0. A layer with no occupied cell
/// holds the bounding-box diagonal everywhere.
pub fn distance_transform(occupancy: &GridLayer) -> GridLayer {
    let spec = occupancy.spec;
    let (rows, cols) = (spec.n_rows, spec.n_cols);
    let mut out = GridLayer::filled("distance", spec, occupancy.altitude, 0.0);
    if !occupancy.values.iter().any(|&v| v > 0.0) {
        out.values.fill(spec.bbox.diagonal());
        return out;
    }
    let n = rows.max(cols);
    let (mut v, mut z) = (vec![0usize; n], vec![0.0f64; n + 1]);
    let mut f = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut sq = vec![0.0f64; rows * cols];

    // columns first
    for c in 0..cols {
        for (r, fr) in f[..rows].iter_mut().enumerate() {
            *fr = if occupancy.values[r * cols + c] > 0.0 { 0.0 } else { f64::INFINITY };
        }
        edt_1d(&f[..rows], &mut d[..rows], &mut v, &mut z);
        for (r, dr) in d[..rows].iter().enumerate() {
            sq[r * cols + c] = *dr;
        }
    }
    for r in 0..rows {
        f[..cols].copy_from_slice(&sq[r * cols..(r + 1) * cols]);
        edt_1d(&f[..cols], &mut d[..cols], &mut v, &mut z);
        for (o, dc) in out.values[r * cols..(r + 1) * cols].iter_mut().zip(&d[..cols]) {
            *o = dc.sqrt() * spec.resolution;
        }
    }
    out
}
