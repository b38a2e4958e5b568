//! Fraction of azimuth scan positions of a spinning multi-beam lidar that
//! return a building within range.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ObstacleSet, Prism};
use crate::world::WorldScene;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LidarConfig {
    /// Beams per scan position, spread evenly over the elevation span.
    pub beams: usize,
    /// Azimuth scan positions per revolution.
    pub scan_positions: usize,
    pub range: f64,
    pub elevation_min_deg: f64,
    pub elevation_max_deg: f64,
    /// Height of the beam origin above the flight altitude.
    pub mount_height: f64,
}

impl Default for LidarConfig {
    fn default() -> Self {
        Self {
            beams: 16,
            scan_positions: 360,
            range: 100.0,
            elevation_min_deg: -15.0,
            elevation_max_deg: 15.0,
            mount_height: 0.0,
        }
    }
}

impl LidarConfig {
    pub fn validate(&self) -> Result<()> {
        if self.beams == 0 || self.scan_positions == 0 || !(self.range > 0.0) {
            return Err(Error::Precondition("lidar needs beams >= 1, scan_positions >= 1, range > 0".into()));
        }
        if !(self.elevation_min_deg <= self.elevation_max_deg)
            || self.elevation_min_deg <= -90.0
            || self.elevation_max_deg >= 90.0
        {
            return Err(Error::Precondition("lidar elevation span must satisfy -90 < min <= max < 90".into()));
        }
        Ok(())
    }

    /// Beam elevation angles in radians.
    pub fn elevations(&self) -> Vec<f64> {
        if self.beams == 1 {
            return vec![(0.5 * (self.elevation_min_deg + self.elevation_max_deg)).to_radians()];
        }
        let step = (self.elevation_max_deg - self.elevation_min_deg) / (self.beams - 1) as f64;
        (0..self.beams).map(|i| (self.elevation_min_deg + i as f64 * step).to_radians()).collect()
    }
}

/// Slab test: does the planar ray `origin + s·dir, s ∈ [0, reach]` touch
/// the footprint extent?
fn ray_touches_extent(origin: [f64; 2], dir: [f64; 2], reach: f64, p: &Prism) -> bool {
    let (x0, y0, x1, y1) = p.extent;
    let (mut lo, mut hi) = (0.0f64, reach);
    for (o, d, a, b) in [(origin[0], dir[0], x0, x1), (origin[1], dir[1], y0, y1)] {
        if d.abs() < 1e-15 {
            if o < a || o > b {
                return false;
            }
        } else {
            let (t0, t1) = ((a - o) / d, (b - o) / d);
            lo = lo.max(t0.min(t1));
            hi = hi.min(t0.max(t1));
        }
    }
    lo <= hi
}

/// Lidar metric at `pos` (vehicle position at flight altitude) against
/// pre-indexed obstacles.
pub fn lidar_metric_with(pos: [f64; 3], obstacles: &ObstacleSet, cfg: &LidarConfig) -> f64 {
    let origin = [pos[0], pos[1]];
    let z0 = pos[2] + cfg.mount_height;
    let beams: Vec<(f64, f64)> = cfg.elevations().into_iter().map(|b| (cfg.range * b.cos(), b.tan())).collect();
    let reach = beams.iter().map(|b| b.0).fold(0.0, f64::max);
    let nearby = obstacles.near(pos[0], pos[1], reach);
    if nearby.is_empty() {
        return 0.0;
    }
    let returns = (0..cfg.scan_positions)
        .filter(|&j| {
            let phi = TAU * j as f64 / cfg.scan_positions as f64;
            let dir = [phi.cos(), phi.sin()];
            nearby.iter().filter(|p| ray_touches_extent(origin, dir, reach, p)).any(|p| {
                let inside = p.footprint_intervals(origin, dir, 0.0, reach);
                beams.iter().any(|&(s_max, slope)| {
                    // horizontal distances at which the beam is between ground and roof
                    let (z_lo, z_hi) = if slope == 0.0 {
                        if z0 < 0.0 || z0 > p.height {
                            return false;
                        }
                        (0.0, s_max)
                    } else {
                        let a = (0.0 - z0) / slope;
                        let b = (p.height - z0) / slope;
                        (a.min(b).max(0.0), a.max(b).min(s_max))
                    };
                    inside.iter().any(|&(lo, hi)| hi.min(z_hi) - lo.max(z_lo) > 1e-12)
                })
            })
        })
        .count();
    returns as f64 / cfg.scan_positions as f64
}

/// Lidar metric at `pos` in a scene.
pub fn lidar_metric(pos: [f64; 3], scene: &WorldScene, cfg: &LidarConfig) -> f64 {
    lidar_metric_with(pos, &ObstacleSet::new(&scene.obstacles, scene.bbox), cfg)
}
