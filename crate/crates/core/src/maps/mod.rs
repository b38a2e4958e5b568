//! Metric map generation. Every layer is stored as a cost (larger = worse)
//! over one [`GridSpec`] at one flight altitude.

mod gps;
mod lidar;
mod population;
mod risk;

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use gps::{covariance_diagonal, gdop, gps_metric, gps_metric_with, gps_score, GpsConfig};
pub use lidar::{lidar_metric, lidar_metric_with, LidarConfig};
pub use population::{
    modified_population, population_layer, population_metric, rasterize_census, CensusRaster, DayNight,
};
pub use risk::{risk_layer, risk_metric};

use crate::error::{Error, Result};
use crate::geometry::{distance_transform, rasterize_occupancy, Cell, GridLayer, GridSpec, ObstacleSet};
use crate::world::WorldScene;

pub const LAYER_NAMES: [&str; 5] = ["obstacle", "gps", "lidar", "population", "risk"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MapConfig {
    pub gps: GpsConfig,
    pub lidar: LidarConfig,
    /// Distance beyond which a building poses no proximity risk.
    pub d_thresh: f64,
}

impl Default for MapConfig {
    fn default() -> Self {
        Self { gps: GpsConfig::default(), lidar: LidarConfig::default(), d_thresh: 10.0 }
    }
}

impl MapConfig {
    pub fn validate(&self) -> Result<()> {
        self.gps.validate()?;
        self.lidar.validate()?;
        if !(self.d_thresh > 0.0) {
            return Err(Error::Precondition("d_thresh must be positive".into()));
        }
        Ok(())
    }
}

/// The five co-registered cost layers at one `(resolution, altitude)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricMapSet {
    pub obstacle: GridLayer,
    pub gps: GridLayer,
    pub lidar: GridLayer,
    pub population: GridLayer,
    pub risk: GridLayer,
    pub day_night: DayNight,
    pub config: MapConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapManifest {
    pub layers: Vec<String>,
    pub resolution: f64,
    pub altitude: f64,
    pub day_night: DayNight,
    pub config: MapConfig,
}

impl MetricMapSet {
    /// Assembles a set from precomputed layers, checking co-registration.
    pub fn from_layers(
        obstacle: GridLayer,
        gps: GridLayer,
        lidar: GridLayer,
        population: GridLayer,
        risk: GridLayer,
        day_night: DayNight,
    ) -> Result<Self> {
        let set = Self { obstacle, gps, lidar, population, risk, day_night, config: MapConfig::default() };
        for layer in set.layers().iter().skip(1) {
            if layer.spec != set.obstacle.spec {
                return Err(Error::Grid(format!("layer {} is not co-registered", layer.name)));
            }
        }
        Ok(set)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.obstacle.spec
    }

    pub fn altitude(&self) -> f64 {
        self.obstacle.altitude
    }

    pub fn layers(&self) -> [&GridLayer; 5] {
        [&self.obstacle, &self.gps, &self.lidar, &self.population, &self.risk]
    }

    /// Cost layers in weight order: gps, lidar, population, risk.
    pub fn cost_layers(&self) -> [&GridLayer; 4] {
        [&self.gps, &self.lidar, &self.population, &self.risk]
    }

    pub fn is_free(&self, cell: Cell) -> bool {
        self.obstacle.get(cell) == 0.0
    }

    /// Unweighted cost of entering `cell`, per cost layer.
    pub fn cell_costs(&self, cell: Cell) -> [f64; 4] {
        let i = self.spec().linear(cell);
        [self.gps.values[i], self.lidar.values[i], self.population.values[i], self.risk.values[i]]
    }

    pub fn manifest(&self) -> MapManifest {
        MapManifest {
            layers: LAYER_NAMES.iter().map(|s| s.to_string()).collect(),
            resolution: self.spec().resolution,
            altitude: self.altitude(),
            day_night: self.day_night,
            config: self.config,
        }
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for layer in self.layers() {
            layer.save(dir)?;
        }
        fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&self.manifest())?)?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let manifest: MapManifest = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
        let load = |name: &str| GridLayer::load(dir, name);
        let mut set = Self::from_layers(
            load("obstacle")?,
            load("gps")?,
            load("lidar")?,
            load("population")?,
            load("risk")?,
            manifest.day_night,
        )?;
        set.config = manifest.config;
        Ok(set)
    }

    /// Pearson correlation between the GPS and lidar cost layers over free
    /// cells, or `None` when either is constant there.
    pub fn gps_lidar_correlation(&self) -> Option<f64> {
        let pairs: Vec<(f64, f64)> =
            self.spec().cells().filter(|&c| self.is_free(c)).map(|c| (self.gps.get(c), self.lidar.get(c))).collect();
        let n = pairs.len() as f64;
        if pairs.len() < 2 {
            return None;
        }
        let (ma, mb) = pairs.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0 / n, b + p.1 / n));
        let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
        for (a, b) in &pairs {
            sab += (a - ma) * (b - mb);
            saa += (a - ma).powi(2);
            sbb += (b - mb).powi(2);
        }
        (saa > 0.0 && sbb > 0.0).then(|| sab / (saa * sbb).sqrt())
    }
}

/// Builds all five cost layers for `scene` at `(resolution, altitude)`.
///
/// Per-cell work runs on the current rayon pool; output does not depend on
/// the number of workers.
pub fn build_map_set(
    scene: &WorldScene,
    resolution: f64,
    altitude: f64,
    day_night: DayNight,
    cfg: &MapConfig,
) -> Result<MetricMapSet> {
    cfg.validate()?;
    if !(altitude > 0.0) {
        return Err(Error::Precondition(format!("altitude {altitude} must be positive")));
    }
    let spec = GridSpec::new(scene.bbox, resolution)?;
    let index = ObstacleSet::new(&scene.obstacles, scene.bbox);
    let centers: Vec<[f64; 3]> = spec
        .cells()
        .map(|c| {
            let [x, y] = spec.cell_center(c);
            [x, y, altitude]
        })
        .collect();

    let obstacle = rasterize_occupancy(&scene.obstacles, &spec, altitude);
    let gps_values: Vec<f64> =
        centers.par_iter().map(|&p| 1.0 - gps_metric_with(p, &scene.satellites, &index, &cfg.gps)).collect();
    let lidar_values: Vec<f64> = centers.par_iter().map(|&p| 1.0 - lidar_metric_with(p, &index, &cfg.lidar)).collect();
    let risk = risk_layer(&distance_transform(&obstacle), cfg.d_thresh);
    let census = rasterize_census(&scene.census, &spec);
    let population = population_layer(&census, day_night, &scene.gammas, altitude);

    Ok(MetricMapSet {
        obstacle,
        gps: GridLayer { name: "gps".into(), spec, altitude, values: gps_values },
        lidar: GridLayer { name: "lidar".into(), spec, altitude, values: lidar_values },
        population,
        risk,
        day_night,
        config: *cfg,
    })
}

/// Min-max normalized sum of the four cost layers (obstacles excluded).
/// A constant sum normalizes to all zeros.
pub fn normalize_total(set: &MetricMapSet) -> GridLayer {
    let spec = *set.spec();
    let total: Vec<f64> = (0..spec.len())
        .map(|i| set.gps.values[i] + set.lidar.values[i] + set.population.values[i] + set.risk.values[i])
        .collect();
    let (lo, hi) = total.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let range = hi - lo;
    let values =
        if range > 0.0 { total.into_iter().map(|v| (v - lo) / range).collect() } else { vec![0.0; spec.len()] };
    GridLayer { name: "total_norm".into(), spec, altitude: set.altitude(), values }
}
