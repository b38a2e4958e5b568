use serde::Serialize;

use super::{BoundingBox, WorldScene};
use crate::error::{Error, Feature};
use crate::geometry::polygon::is_simple;

/// Bounding box sides must be a whole multiple of this length so that every
/// default resolution (2, 5 and 10 m) tiles the box exactly.
pub const GRID_MODULUS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Geometry,
    Bounds,
    Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub feature: Feature,
    pub kind: ViolationKind,
    pub message: String,
}

impl Violation {
    fn new(feature: Feature, kind: ViolationKind, message: impl Into<String>) -> Self {
        Self { feature, kind, message: message.into() }
    }

    pub fn into_error(self) -> Error {
        let Violation { feature, kind, message } = self;
        match kind {
            ViolationKind::Geometry => Error::Parse { feature, message },
            ViolationKind::Bounds => Error::Bounds { feature, message },
            ViolationKind::Value => Error::Schema { feature, message },
        }
    }
}

pub(crate) fn is_whole_multiple(length: f64, step: f64) -> bool {
    let q = length / step;
    q >= 1.0 && (q - q.round()).abs() <= 1e-9 * q.max(1.0)
}

fn check_bbox(bbox: &BoundingBox, out: &mut Vec<Violation>) {
    let finite = [bbox.x_min, bbox.y_min, bbox.x_max, bbox.y_max].iter().all(|v| v.is_finite());
    if !finite || bbox.x_min >= bbox.x_max || bbox.y_min >= bbox.y_max {
        out.push(Violation::new(Feature::Bbox, ViolationKind::Geometry, "empty or non-finite extent"));
        return;
    }
    for (name, len) in [("width", bbox.width()), ("height", bbox.height())] {
        if !is_whole_multiple(len, GRID_MODULUS) {
            out.push(Violation::new(
                Feature::Bbox,
                ViolationKind::Value,
                format!("{name} {len} m is not a multiple of {GRID_MODULUS} m"),
            ));
        }
    }
}

fn check_ring(feature: Feature, ring: &[[f64; 2]], bbox: &BoundingBox, out: &mut Vec<Violation>) {
    if ring.len() < 3 {
        out.push(Violation::new(feature, ViolationKind::Geometry, "ring has fewer than 3 vertices"));
        return;
    }
    if ring.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
        out.push(Violation::new(feature, ViolationKind::Geometry, "non-finite vertex"));
        return;
    }
    if !is_simple(ring) {
        out.push(Violation::new(feature, ViolationKind::Geometry, "ring is not simple"));
    }
    if let Some(p) = ring.iter().find(|p| !bbox.contains(p[0], p[1])) {
        out.push(Violation::new(feature, ViolationKind::Bounds, format!("vertex ({}, {}) outside bbox", p[0], p[1])));
    }
}

/// Lists every violated scene invariant. An empty report means the scene is
/// valid.
pub fn validate_scene(scene: &WorldScene) -> Vec<Violation> {
    let mut out = Vec::new();
    check_bbox(&scene.bbox, &mut out);
    for (i, o) in scene.obstacles.iter().enumerate() {
        let f = Feature::Obstacle(i);
        check_ring(f, &o.ring, &scene.bbox, &mut out);
        if !(o.height > 0.0 && o.height.is_finite()) {
            out.push(Violation::new(f, ViolationKind::Value, format!("height {} must be > 0", o.height)));
        }
    }
    for (i, c) in scene.census.iter().enumerate() {
        check_ring(Feature::Census(i), &c.ring, &scene.bbox, &mut out);
    }
    for (i, s) in scene.satellites.iter().enumerate() {
        let f = Feature::Satellite(i);
        if ![s.x, s.y, s.z].iter().all(|v| v.is_finite()) {
            out.push(Violation::new(f, ViolationKind::Value, "non-finite position"));
        } else if s.z <= 0.0 {
            out.push(Violation::new(f, ViolationKind::Value, format!("z = {} is not above ground", s.z)));
        }
    }
    let g = scene.gammas;
    if !(g.commercial > 0.0 && g.residential > 0.0) {
        out.push(Violation::new(Feature::Gammas, ViolationKind::Value, "modifiers must be > 0"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::{CensusBlock, ObstaclePolygon, Zoning};

    fn scene() -> WorldScene {
        let mut s = WorldScene::empty(BoundingBox::new(0.0, 0.0, 100.0, 100.0), vec![]);
        s.obstacles
            .push(ObstaclePolygon { ring: vec![[10.0, 10.0], [20.0, 10.0], [20.0, 20.0], [10.0, 20.0]], height: 30.0 });
        s
    }

    #[test]
    fn valid_scene_has_empty_report() {
        assert!(validate_scene(&scene()).is_empty());
    }

    #[test]
    fn zero_height_reports_one_violation() {
        let mut s = scene();
        s.obstacles[0].height = 0.0;
        let report = validate_scene(&s);
        assert_eq!(report.len(), 1);
        assert_eq!(report[0].feature, Feature::Obstacle(0));
        assert_eq!(report[0].kind, ViolationKind::Value);
    }

    #[test]
    fn census_block_crossing_edge_is_bounds_violation() {
        let mut s = scene();
        s.census.push(CensusBlock {
            ring: vec![[90.0, 0.0], [100.5, 0.0], [100.5, 10.0], [90.0, 10.0]],
            population: 10,
            zoning: Zoning::Residential,
        });
        let report = validate_scene(&s);
        assert_eq!(report.len(), 1);
        assert_eq!(report[0].feature, Feature::Census(0));
        assert_eq!(report[0].kind, ViolationKind::Bounds);
    }

    #[test]
    fn bbox_must_tile_by_ten_meters() {
        let mut s = scene();
        s.bbox.x_max = 105.0;
        let report = validate_scene(&s);
        assert_eq!(report.len(), 1);
        assert_eq!(report[0].feature, Feature::Bbox);
    }
}
