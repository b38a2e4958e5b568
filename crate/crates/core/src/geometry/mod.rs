//! Grid indexing, rasterization, ray casting and distance fields.

mod edt;
mod grid;
pub mod polygon;
mod raster;
mod ray;
mod trace;

pub use edt::distance_transform;
pub use grid::{Cell, GridLayer, GridSpec, LayerHeader};
pub(crate) use raster::center_span as raster_center_span;
pub use raster::rasterize_occupancy;
pub use ray::{ray_hits_obstacle, ObstacleSet, Prism};
pub use trace::trace_segment;
