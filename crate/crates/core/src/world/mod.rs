//! Scene description: bounding box, extruded building footprints, census
//! blocks and a static satellite constellation.
//!
//! Scenes are immutable once loaded. All coordinates live in one planar
//! metric frame (easting, northing, altitude above the z = 0 ground plane).

mod synth;
pub(crate) mod validate;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use synth::{synth_scene, SynthConfig};
pub use validate::{validate_scene, Violation, ViolationKind, GRID_MODULUS};

use crate::error::{Error, Feature, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl BoundingBox {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Self {
        Self { x_min, y_min, x_max, y_max }
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    /// Closed containment (both edges inclusive).
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x_min && x <= self.x_max && y >= self.y_min && y <= self.y_max
    }
}

/// A building footprint extruded from the ground to a flat roof at `height`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstaclePolygon {
    pub ring: Vec<[f64; 2]>,
    pub height: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Zoning {
    Commercial,
    Residential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusBlock {
    pub ring: Vec<[f64; 2]>,
    /// Nighttime (resident) head count.
    pub population: u64,
    pub zoning: Zoning,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SatellitePosition {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SatellitePosition {
    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// Daytime population modifiers per zoning class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gammas {
    pub commercial: f64,
    pub residential: f64,
}

impl Default for Gammas {
    fn default() -> Self {
        Self { commercial: 3.0, residential: 0.5 }
    }
}

impl Gammas {
    pub fn for_zoning(&self, zoning: Zoning) -> f64 {
        match zoning {
            Zoning::Commercial => self.commercial,
            Zoning::Residential => self.residential,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldScene {
    pub bbox: BoundingBox,
    pub obstacles: Vec<ObstaclePolygon>,
    pub census: Vec<CensusBlock>,
    pub satellites: Vec<SatellitePosition>,
    pub gammas: Gammas,
}

impl WorldScene {
    /// A scene with no features, open sky and default modifiers.
    pub fn empty(bbox: BoundingBox, satellites: Vec<SatellitePosition>) -> Self {
        Self { bbox, obstacles: Vec::new(), census: Vec::new(), satellites, gammas: Gammas::default() }
    }

    pub fn max_obstacle_height(&self) -> f64 {
        self.obstacles.iter().map(|o| o.height).fold(0.0, f64::max)
    }
}

// Loose mirror of the document used to report missing keys per feature
// instead of serde's generic message.
#[derive(Deserialize)]
struct RawScene {
    bbox: Option<BoundingBox>,
    #[serde(default)]
    obstacles: Vec<RawObstacle>,
    #[serde(default)]
    census: Vec<RawCensus>,
    #[serde(default)]
    satellites: Vec<SatellitePosition>,
    gammas: Option<Gammas>,
}

#[derive(Deserialize)]
struct RawObstacle {
    ring: Option<Vec<[f64; 2]>>,
    height: Option<f64>,
}

#[derive(Deserialize)]
struct RawCensus {
    ring: Option<Vec<[f64; 2]>>,
    population: Option<u64>,
    zoning: Option<Zoning>,
}

fn schema(feature: Feature, message: &str) -> Error {
    Error::Schema { feature, message: message.to_string() }
}

/// Drops an explicit closing vertex so rings are stored open.
fn open_ring(mut ring: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    if ring.len() > 1 && ring.first() == ring.last() {
        ring.pop();
    }
    ring
}

/// Parses a scene document, checking structure only.
pub fn parse_scene(document: &str) -> Result<WorldScene> {
    let raw: RawScene = serde_json::from_str(document)?;
    let bbox = raw.bbox.ok_or_else(|| schema(Feature::Bbox, "missing bbox"))?;
    let obstacles = raw
        .obstacles
        .into_iter()
        .enumerate()
        .map(|(i, o)| {
            let ring = o.ring.ok_or_else(|| schema(Feature::Obstacle(i), "missing ring"))?;
            let height = o.height.ok_or_else(|| schema(Feature::Obstacle(i), "missing height"))?;
            Ok(ObstaclePolygon { ring: open_ring(ring), height })
        })
        .collect::<Result<Vec<_>>>()?;
    let census = raw
        .census
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let ring = c.ring.ok_or_else(|| schema(Feature::Census(i), "missing ring"))?;
            let population = c.population.ok_or_else(|| schema(Feature::Census(i), "missing population"))?;
            let zoning = c.zoning.ok_or_else(|| schema(Feature::Census(i), "missing zoning"))?;
            Ok(CensusBlock { ring: open_ring(ring), population, zoning })
        })
        .collect::<Result<Vec<_>>>()?;
    let scene = WorldScene {
        bbox,
        obstacles,
        census,
        satellites: raw.satellites,
        gammas: raw.gammas.ok_or_else(|| schema(Feature::Gammas, "missing gammas"))?,
    };
    Ok(scene)
}

/// Parses and validates a scene document, failing on the first violation.
pub fn load_scene(document: &str) -> Result<WorldScene> {
    let scene = parse_scene(document)?;
    if let Some(v) = validate_scene(&scene).into_iter().next() {
        return Err(v.into_error());
    }
    Ok(scene)
}

pub fn save_scene(scene: &WorldScene) -> String {
    serde_json::to_string_pretty(scene).expect("scene serialization is infallible")
}

pub fn load_scene_file(path: impl AsRef<Path>) -> Result<WorldScene> {
    load_scene(&std::fs::read_to_string(path)?)
}

pub fn save_scene_file(scene: &WorldScene, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, save_scene(scene))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_doc(ring: &str) -> String {
        format!(
            r#"{{
                "bbox": {{"x_min": 0, "y_min": 0, "x_max": 100, "y_max": 100}},
                "obstacles": [{{"ring": {ring}, "height": 50}}],
                "census": [],
                "satellites": [
                    {{"x": 0, "y": 0, "z": 20000000}},
                    {{"x": 15000000, "y": 0, "z": 12000000}},
                    {{"x": -7000000, "y": 12000000, "z": 12000000}},
                    {{"x": -7000000, "y": -12000000, "z": 12000000}}
                ],
                "gammas": {{"commercial": 3.0, "residential": 0.5}}
            }}"#
        )
    }

    #[test]
    fn minimal_scene_loads() {
        let scene = load_scene(&minimal_doc("[[40,40],[60,40],[60,60],[40,60]]")).unwrap();
        assert_eq!(scene.obstacles.len(), 1);
        assert_eq!(scene.obstacles[0].height, 50.0);
        assert_eq!(scene.satellites.len(), 4);
    }

    #[test]
    fn closing_vertex_is_dropped() {
        let scene = load_scene(&minimal_doc("[[40,40],[60,40],[60,60],[40,60],[40,40]]")).unwrap();
        assert_eq!(scene.obstacles[0].ring.len(), 4);
    }

    #[test]
    fn self_intersecting_ring_is_a_parse_error() {
        let err = load_scene(&minimal_doc("[[40,40],[60,60],[60,40],[40,60]]")).unwrap_err();
        assert!(matches!(err, Error::Parse { feature: Feature::Obstacle(0), .. }), "{err}");
    }

    #[test]
    fn out_of_bbox_is_a_bounds_error() {
        let err = load_scene(&minimal_doc("[[90,90],[110,90],[110,99],[90,99]]")).unwrap_err();
        assert!(matches!(err, Error::Bounds { feature: Feature::Obstacle(0), .. }), "{err}");
    }

    #[test]
    fn missing_height_is_a_schema_error() {
        let doc = minimal_doc("[[40,40],[60,40],[60,60],[40,60]]").replace(r#", "height": 50"#, "");
        let err = load_scene(&doc).unwrap_err();
        assert!(matches!(err, Error::Schema { feature: Feature::Obstacle(0), .. }), "{err}");
    }

    #[test]
    fn missing_zoning_is_a_schema_error() {
        let doc = minimal_doc("[[40,40],[60,40],[60,60],[40,60]]")
            .replace(r#""census": []"#, r#""census": [{"ring": [[0,0],[10,0],[10,10]], "population": 5}]"#);
        let err = load_scene(&doc).unwrap_err();
        assert!(matches!(err, Error::Schema { feature: Feature::Census(0), .. }), "{err}");
    }
}
