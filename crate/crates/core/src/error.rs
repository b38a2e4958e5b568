use std::path::PathBuf;

use thiserror::Error;

/// Which part of a scene a diagnostic refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum Feature {
    Bbox,
    Obstacle(usize),
    Census(usize),
    Satellite(usize),
    Gammas,
}

impl std::fmt::Display for Feature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Feature::Bbox => write!(f, "bbox"),
            Feature::Obstacle(i) => write!(f, "obstacles[{i}]"),
            Feature::Census(i) => write!(f, "census[{i}]"),
            Feature::Satellite(i) => write!(f, "satellites[{i}]"),
            Feature::Gammas => write!(f, "gammas"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),

    #[error("schema error at {feature}: {message}")]
    Schema { feature: Feature, message: String },

    #[error("invalid geometry at {feature}: {message}")]
    Parse { feature: Feature, message: String },

    #[error("{feature} lies outside the bounding box: {message}")]
    Bounds { feature: Feature, message: String },

    #[error("point ({x}, {y}) is outside the grid")]
    OutOfBounds { x: f64, y: f64 },

    #[error("cannot place {requested} obstacles, capacity is {capacity}")]
    Capacity { requested: usize, capacity: usize },

    #[error("grid error: {0}")]
    Grid(String),

    #[error("degenerate satellite geometry: {0}")]
    Geometry(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("transition into occupied cell ({col}, {row})")]
    InfeasibleTransition { col: usize, row: usize },

    #[error("no free cells to sample from")]
    EmptyDomain,

    #[error("layer file {path}: {message}")]
    LayerFormat { path: PathBuf, message: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
