use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{BoundingBox, CensusBlock, Gammas, ObstaclePolygon, SatellitePosition, WorldScene, Zoning};
use crate::error::{Error, Result};

/// Slant range used for synthetic satellites (roughly a GPS orbit).
const SAT_RANGE_M: f64 = 20_200_000.0;

/// Parameters for a synthetic street-grid city.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub bbox: BoundingBox,
    pub obstacle_count: usize,
    /// `(min, max)` roof height in meters.
    pub height_range: (f64, f64),
    /// Census blocks along x and y.
    pub block_grid: (usize, usize),
    pub seed: u64,
    /// Edge length of one street-grid lot; each lot holds at most one building.
    pub lot_size: f64,
    pub satellite_count: usize,
    pub max_population: u64,
    pub gammas: Gammas,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            bbox: BoundingBox::new(0.0, 0.0, 320.0, 320.0),
            obstacle_count: 20,
            height_range: (10.0, 150.0),
            block_grid: (4, 4),
            seed: 0,
            lot_size: 40.0,
            satellite_count: 10,
            max_population: 5_000,
            gammas: Gammas::default(),
        }
    }
}

fn centimeters(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

/// Generates a deterministic city: axis-aligned buildings on a jittered
/// street grid, a checkerboard of commercial/residential census blocks and a
/// spread-out constellation above the scene.
pub fn synth_scene(cfg: &SynthConfig) -> Result<WorldScene> {
    let (h_min, h_max) = cfg.height_range;
    if !(h_min > 0.0 && h_max >= h_min) {
        return Err(Error::Precondition(format!("invalid height range ({h_min}, {h_max})")));
    }
    if !(cfg.lot_size > 0.0) {
        return Err(Error::Precondition("lot_size must be positive".into()));
    }
    let bbox = cfg.bbox;
    let lots_x = (bbox.width() / cfg.lot_size).floor() as usize;
    let lots_y = (bbox.height() / cfg.lot_size).floor() as usize;
    let capacity = lots_x * lots_y;
    if cfg.obstacle_count > capacity {
        return Err(Error::Capacity { requested: cfg.obstacle_count, capacity });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut lots: Vec<usize> = (0..capacity).collect();
    lots.shuffle(&mut rng);
    let mut chosen = lots[..cfg.obstacle_count].to_vec();
    chosen.sort_unstable();

    let lot = cfg.lot_size;
    let margin = 0.15 * lot;
    let obstacles = chosen
        .into_iter()
        .map(|id| {
            let (lx, ly) = (id % lots_x, id / lots_x);
            let w = rng.gen_range(0.3..=0.7) * lot;
            let h = rng.gen_range(0.3..=0.7) * lot;
            let x0 = bbox.x_min + lx as f64 * lot + margin + rng.gen_range(0.0..=lot - 2.0 * margin - w);
            let y0 = bbox.y_min + ly as f64 * lot + margin + rng.gen_range(0.0..=lot - 2.0 * margin - h);
            let (x0, y0) = (centimeters(x0), centimeters(y0));
            let (x1, y1) = (centimeters(x0 + w), centimeters(y0 + h));
            let height = if h_max > h_min { centimeters(rng.gen_range(h_min..=h_max)) } else { h_min };
            ObstaclePolygon { ring: vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]], height }
        })
        .collect();

    let (bx, by) = cfg.block_grid;
    let mut census = Vec::with_capacity(bx * by);
    if bx > 0 && by > 0 {
        let (bw, bh) = (bbox.width() / bx as f64, bbox.height() / by as f64);
        for j in 0..by {
            for i in 0..bx {
                let x0 = bbox.x_min + i as f64 * bw;
                let y0 = bbox.y_min + j as f64 * bh;
                let x1 = if i + 1 == bx { bbox.x_max } else { x0 + bw };
                let y1 = if j + 1 == by { bbox.y_max } else { y0 + bh };
                let zoning = if (i + j) % 2 == 0 { Zoning::Commercial } else { Zoning::Residential };
                census.push(CensusBlock {
                    ring: vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]],
                    population: rng.gen_range(0..=cfg.max_population),
                    zoning,
                });
            }
        }
    }

    let (cx, cy) = (0.5 * (bbox.x_min + bbox.x_max), 0.5 * (bbox.y_min + bbox.y_max));
    let n = cfg.satellite_count;
    let satellites = (0..n)
        .map(|i| {
            let az = std::f64::consts::TAU * (i as f64 + rng.gen_range(0.0..0.5)) / n as f64;
            let el = rng.gen_range(15.0_f64..85.0).to_radians();
            SatellitePosition {
                x: cx + SAT_RANGE_M * el.cos() * az.cos(),
                y: cy + SAT_RANGE_M * el.cos() * az.sin(),
                z: SAT_RANGE_M * el.sin(),
            }
        })
        .collect();

    Ok(WorldScene { bbox, obstacles, census, satellites, gammas: cfg.gammas })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::validate_scene;

    #[test]
    fn same_seed_same_scene() {
        let cfg = SynthConfig { seed: 7, ..Default::default() };
        assert_eq!(synth_scene(&cfg).unwrap(), synth_scene(&cfg).unwrap());
    }

    #[test]
    fn zero_obstacles() {
        let cfg = SynthConfig { obstacle_count: 0, ..Default::default() };
        assert!(synth_scene(&cfg).unwrap().obstacles.is_empty());
    }

    #[test]
    fn fifty_rectangles_validate() {
        let cfg = SynthConfig { obstacle_count: 50, seed: 3, ..Default::default() };
        let scene = synth_scene(&cfg).unwrap();
        assert_eq!(scene.obstacles.len(), 50);
        for o in &scene.obstacles {
            let w = o.ring[1][0] - o.ring[0][0];
            let h = o.ring[2][1] - o.ring[1][1];
            assert!(w > 0.0 && h > 0.0);
        }
        assert!(validate_scene(&scene).is_empty());
    }

    #[test]
    fn too_many_obstacles_is_capacity_error() {
        let cfg = SynthConfig { obstacle_count: 65, ..Default::default() };
        assert!(matches!(synth_scene(&cfg), Err(Error::Capacity { requested: 65, capacity: 64 })));
    }

    #[test]
    fn bad_height_range_rejected() {
        let cfg = SynthConfig { height_range: (0.0, 10.0), ..Default::default() };
        assert!(synth_scene(&cfg).is_err());
    }
}
