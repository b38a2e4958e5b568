//! Metric maps and multi-objective path planning for constant-altitude
//! multicopter flight over 2.5D urban scenes.
//!
//! The pipeline is: a [`world::WorldScene`] is rasterized into a
//! [`maps::MetricMapSet`] (obstacle, GPS, lidar, population and proximity
//! risk layers) at one resolution and altitude; planners in [`planner`]
//! search that set under a weighted cost from [`cost`]; [`harness`] runs
//! Monte Carlo comparisons of the planners.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod world;

pub use error::{Error, Result};
pub mod cost;
pub mod harness;
pub mod maps;
pub mod planner;
pub mod render;

#[cfg(test)]
mod test_util;
