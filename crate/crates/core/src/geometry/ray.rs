//! Segment queries against extruded building prisms (ground to flat roof).

use super::polygon::{contains_point, edges, ring_extent};
use crate::world::{BoundingBox, ObstaclePolygon};

/// Intervals shorter than this (in segment parameter) are treated as grazing
/// contact and ignored.
const GRAZE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Prism {
    pub ring: Vec<[f64; 2]>,
    pub height: f64,
    /// `(x_min, y_min, x_max, y_max)` of the footprint.
    pub extent: (f64, f64, f64, f64),
}

impl Prism {
    pub fn new(o: &ObstaclePolygon) -> Self {
        Self { ring: o.ring.clone(), height: o.height, extent: ring_extent(&o.ring) }
    }

    /// Parameter intervals `t ∈ [t_lo, t_hi]` over which the planar point
    /// `origin + t·delta` is inside the footprint.
    pub(crate) fn footprint_intervals(
        &self,
        origin: [f64; 2],
        delta: [f64; 2],
        t_lo: f64,
        t_hi: f64,
    ) -> Vec<(f64, f64)> {
        let mut cuts = vec![t_lo, t_hi];
        for (a, b) in edges(&self.ring) {
            let e = [b[0] - a[0], b[1] - a[1]];
            let denom = delta[0] * e[1] - delta[1] * e[0];
            if denom == 0.0 {
                continue;
            }
            let w = [a[0] - origin[0], a[1] - origin[1]];
            let t = (w[0] * e[1] - w[1] * e[0]) / denom;
            let u = (w[0] * delta[1] - w[1] * delta[0]) / denom;
            if t > t_lo && t < t_hi && (-1e-12..=1.0 + 1e-12).contains(&u) {
                cuts.push(t);
            }
        }
        cuts.sort_by(f64::total_cmp);
        let mut out: Vec<(f64, f64)> = Vec::new();
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if hi - lo <= GRAZE {
                continue;
            }
            let mid = 0.5 * (lo + hi);
            if contains_point(&self.ring, [origin[0] + mid * delta[0], origin[1] + mid * delta[1]]) {
                match out.last_mut() {
                    Some(last) if last.1 >= lo => last.1 = hi,
                    _ => out.push((lo, hi)),
                }
            }
        }
        out
    }

    /// Whether the open segment `a → b` passes through the prism volume.
    pub fn hits_segment(&self, a: [f64; 3], b: [f64; 3]) -> bool {
        let dz = b[2] - a[2];
        let (t_lo, t_hi) = if dz == 0.0 {
            if a[2] < 0.0 || a[2] > self.height {
                return false;
            }
            (0.0, 1.0)
        } else {
            let t0 = (0.0 - a[2]) / dz;
            let t1 = (self.height - a[2]) / dz;
            (t0.min(t1).max(0.0), t0.max(t1).min(1.0))
        };
        if t_hi - t_lo <= GRAZE {
            return false;
        }
        let delta = [b[0] - a[0], b[1] - a[1]];
        let (px0, px1) = ordered(a[0] + t_lo * delta[0], a[0] + t_hi * delta[0]);
        let (py0, py1) = ordered(a[1] + t_lo * delta[1], a[1] + t_hi * delta[1]);
        let (x0, y0, x1, y1) = self.extent;
        if px1 < x0 || px0 > x1 || py1 < y0 || py0 > y1 {
            return false;
        }
        !self.footprint_intervals([a[0], a[1]], delta, t_lo, t_hi).is_empty()
    }
}

fn ordered(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// True iff the open segment `origin → target` intersects any extruded
/// obstacle (side walls or roof). Linear scan; see [`ObstacleSet`] for bulk
/// queries.
pub fn ray_hits_obstacle(origin: [f64; 3], target: [f64; 3], obstacles: &[ObstaclePolygon]) -> bool {
    obstacles.iter().any(|o| Prism::new(o).hits_segment(origin, target))
}

/// Obstacles bucketed on a coarse uniform grid for segment and radius
/// queries.
#[derive(Debug, Clone)]
pub struct ObstacleSet {
    prisms: Vec<Prism>,
    bbox: BoundingBox,
    bucket: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
    max_height: f64,
}

impl ObstacleSet {
    pub fn new(obstacles: &[ObstaclePolygon], bbox: BoundingBox) -> Self {
        let prisms: Vec<Prism> = obstacles.iter().map(Prism::new).collect();
        let bucket = (bbox.width().max(bbox.height()) / 64.0).max(10.0);
        let nx = ((bbox.width() / bucket).ceil() as usize).max(1);
        let ny = ((bbox.height() / bucket).ceil() as usize).max(1);
        let mut buckets = vec![Vec::new(); nx * ny];
        for (i, p) in prisms.iter().enumerate() {
            let (x0, y0, x1, y1) = p.extent;
            let (bx0, by0) = Self::bucket_of(&bbox, bucket, nx, ny, x0, y0);
            let (bx1, by1) = Self::bucket_of(&bbox, bucket, nx, ny, x1, y1);
            for by in by0..=by1 {
                for bx in bx0..=bx1 {
                    buckets[by * nx + bx].push(i as u32);
                }
            }
        }
        let max_height = prisms.iter().map(|p| p.height).fold(0.0, f64::max);
        Self { prisms, bbox, bucket, nx, ny, buckets, max_height }
    }

    fn bucket_of(bbox: &BoundingBox, bucket: f64, nx: usize, ny: usize, x: f64, y: f64) -> (usize, usize) {
        let bx = ((x - bbox.x_min) / bucket).floor().clamp(0.0, (nx - 1) as f64) as usize;
        let by = ((y - bbox.y_min) / bucket).floor().clamp(0.0, (ny - 1) as f64) as usize;
        (bx, by)
    }

    pub fn prisms(&self) -> &[Prism] {
        &self.prisms
    }

    pub fn is_empty(&self) -> bool {
        self.prisms.is_empty()
    }

    pub fn max_height(&self) -> f64 {
        self.max_height
    }

    /// Prisms whose footprint extent comes within `radius` of `(x, y)`,
    /// in ascending obstacle order.
    pub fn near(&self, x: f64, y: f64, radius: f64) -> Vec<&Prism> {
        let (bx0, by0) = Self::bucket_of(&self.bbox, self.bucket, self.nx, self.ny, x - radius, y - radius);
        let (bx1, by1) = Self::bucket_of(&self.bbox, self.bucket, self.nx, self.ny, x + radius, y + radius);
        let mut ids: Vec<u32> = (by0..=by1)
            .flat_map(|by| (bx0..=bx1).flat_map(move |bx| self.buckets[by * self.nx + bx].iter().copied()))
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids.into_iter()
            .map(|i| &self.prisms[i as usize])
            .filter(|p| {
                let (x0, y0, x1, y1) = p.extent;
                let dx = (x0 - x).max(0.0).max(x - x1);
                let dy = (y0 - y).max(0.0).max(y - y1);
                dx.hypot(dy) <= radius
            })
            .collect()
    }

    /// Candidate prisms along the planar segment `a → b` (buckets visited by
    /// a grid walk), deduplicated.
    fn candidates(&self, a: [f64; 2], b: [f64; 2]) -> Vec<u32> {
        let Some((a, b)) = clip_to_box(a, b, &self.bbox) else {
            return Vec::new();
        };
        let (mut bx, mut by) = Self::bucket_of(&self.bbox, self.bucket, self.nx, self.ny, a[0], a[1]);
        let (ex, ey) = Self::bucket_of(&self.bbox, self.bucket, self.nx, self.ny, b[0], b[1]);
        let d = [b[0] - a[0], b[1] - a[1]];
        let step_x: isize = if d[0] > 0.0 { 1 } else { -1 };
        let step_y: isize = if d[1] > 0.0 { 1 } else { -1 };
        let boundary =
            |i: usize, step: isize, origin: f64| origin + (i as f64 + if step > 0 { 1.0 } else { 0.0 }) * self.bucket;
        let mut t_max_x =
            if d[0] != 0.0 { (boundary(bx, step_x, self.bbox.x_min) - a[0]) / d[0] } else { f64::INFINITY };
        let mut t_max_y =
            if d[1] != 0.0 { (boundary(by, step_y, self.bbox.y_min) - a[1]) / d[1] } else { f64::INFINITY };
        let t_dx = if d[0] != 0.0 { self.bucket / d[0].abs() } else { f64::INFINITY };
        let t_dy = if d[1] != 0.0 { self.bucket / d[1].abs() } else { f64::INFINITY };
        let mut ids = Vec::new();
        let max_steps = self.nx + self.ny + 2;
        for _ in 0..=max_steps {
            ids.extend_from_slice(&self.buckets[by * self.nx + bx]);
            if bx == ex && by == ey {
                break;
            }
            if t_max_x <= t_max_y {
                let nbx = bx as isize + step_x;
                if nbx < 0 || nbx as usize >= self.nx {
                    break;
                }
                bx = nbx as usize;
                t_max_x += t_dx;
            } else {
                let nby = by as isize + step_y;
                if nby < 0 || nby as usize >= self.ny {
                    break;
                }
                by = nby as usize;
                t_max_y += t_dy;
            }
        }
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Bulk equivalent of [`ray_hits_obstacle`].
    pub fn ray_hits(&self, a: [f64; 3], b: [f64; 3]) -> bool {
        if self.prisms.is_empty() {
            return false;
        }
        // only the part of the segment at or below the tallest roof matters
        let dz = b[2] - a[2];
        let (t_lo, t_hi) = if dz == 0.0 {
            if a[2] > self.max_height || a[2] < 0.0 {
                return false;
            }
            (0.0, 1.0)
        } else {
            let t0 = (0.0 - a[2]) / dz;
            let t1 = (self.max_height - a[2]) / dz;
            (t0.min(t1).max(0.0), t0.max(t1).min(1.0))
        };
        if t_hi - t_lo <= GRAZE {
            return false;
        }
        let lerp = |t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
        self.candidates(lerp(t_lo), lerp(t_hi)).into_iter().any(|i| self.prisms[i as usize].hits_segment(a, b))
    }
}

/// Liang–Barsky clip of a planar segment to a box (slightly inflated).
fn clip_to_box(a: [f64; 2], b: [f64; 2], bbox: &BoundingBox) -> Option<([f64; 2], [f64; 2])> {
    let pad = 1e-9 * bbox.diagonal().max(1.0);
    let d = [b[0] - a[0], b[1] - a[1]];
    let (mut t0, mut t1) = (0.0_f64, 1.0_f64);
    let checks = [
        (-d[0], a[0] - (bbox.x_min - pad)),
        (d[0], (bbox.x_max + pad) - a[0]),
        (-d[1], a[1] - (bbox.y_min - pad)),
        (d[1], (bbox.y_max + pad) - a[1]),
    ];
    for (p, q) in checks {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
    }
    (t0 <= t1).then(|| ([a[0] + t0 * d[0], a[1] + t0 * d[1]], [a[0] + t1 * d[0], a[1] + t1 * d[1]]))
}
