use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};
use uasmap::cost::WeightVector;
use uasmap::harness::ExperimentConfig;
use uasmap::maps::{DayNight, MapConfig};
use uasmap::planner::{Algorithm, BitStarParams, SpanMode};

/// Contents of the `--config` file. Every section is optional; command-line
/// flags override whatever is set here.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    pub threads: Option<usize>,
    pub maps: MapConfig,
    pub gen_maps: GenMapsSettings,
    pub plan: PlanSettings,
    pub experiment: ExperimentConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenMapsSettings {
    pub resolution: f64,
    pub altitude: f64,
    pub day_night: DayNight,
}

impl Default for GenMapsSettings {
    fn default() -> Self {
        Self { resolution: 5.0, altitude: 20.0, day_night: DayNight::Day }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlanSettings {
    pub algo: Algorithm,
    pub weights: WeightVector,
    pub deadline_s: f64,
    pub bitstar: BitStarParams,
    pub span: SpanMode,
}

impl Default for PlanSettings {
    fn default() -> Self {
        Self {
            algo: Algorithm::AstarPlus,
            weights: WeightVector::distance_only(),
            deadline_s: 180.0,
            bitstar: BitStarParams::default(),
            span: SpanMode::default(),
        }
    }
}

impl Settings {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}
