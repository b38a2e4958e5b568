use super::grid::{Cell, GridLayer, GridSpec};
use super::polygon::{contains_point, ring_extent};
use crate::world::ObstaclePolygon;

/// Inclusive range of cell indices whose centers fall in `[lo, hi]` along
/// one axis, or `None` when empty.
pub(crate) fn center_span(lo: f64, hi: f64, origin: f64, res: f64, n: usize) -> Option<(usize, usize)> {
    let first = ((lo - origin) / res - 0.5).ceil().max(0.0);
    let last = ((hi - origin) / res - 0.5).floor().min(n as f64 - 1.0);
    (first <= last).then_some((first as usize, last as usize))
}

/// Binary occupancy at `altitude`: a cell is 1 when its center lies inside
/// (or on the edge of) a footprint whose roof is at or above the altitude.
pub fn rasterize_occupancy(obstacles: &[ObstaclePolygon], spec: &GridSpec, altitude: f64) -> GridLayer {
    let mut layer = GridLayer::filled("obstacle", *spec, altitude, 0.0);
    let b = spec.bbox;
    for o in obstacles.iter().filter(|o| o.height >= altitude) {
        let (x0, y0, x1, y1) = ring_extent(&o.ring);
        let (Some((c0, c1)), Some((r0, r1))) = (
            center_span(x0, x1, b.x_min, spec.resolution, spec.n_cols),
            center_span(y0, y1, b.y_min, spec.resolution, spec.n_rows),
        ) else {
            continue;
        };
        for row in r0..=r1 {
            for col in c0..=c1 {
                let cell = Cell::new(col, row);
                if contains_point(&o.ring, spec.cell_center(cell)) {
                    layer.set(cell, 1.0);
                }
            }
        }
    }
    layer
}
