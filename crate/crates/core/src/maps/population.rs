//! Census-driven population exposure with a day/night zoning modifier.

use serde::{Deserialize, Serialize};

use crate::geometry::polygon::{contains_point, ring_extent};
use crate::geometry::{Cell, GridLayer, GridSpec};
use crate::world::{CensusBlock, Gammas, Zoning};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DayNight {
    Day,
    Night,
}

impl std::fmt::Display for DayNight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DayNight::Day => "day",
            DayNight::Night => "night",
        })
    }
}

/// Census counts are nighttime residents; daytime counts are scaled by the
/// zoning modifier.
pub fn modified_population(pop_census: f64, zoning: Zoning, when: DayNight, gammas: &Gammas) -> f64 {
    match when {
        DayNight::Day => gammas.for_zoning(zoning) * pop_census,
        DayNight::Night => pop_census,
    }
}

/// Normalized exposure in `[0, 1]`. A non-positive normalizer (no
/// population anywhere) yields 0.
pub fn population_metric(pop_mod: f64, pop_norm: f64) -> f64 {
    if pop_norm > 0.0 {
        (pop_mod / pop_norm).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

/// Per-cell census attributes, taken from the first block containing the
/// cell center. Uncovered cells are residential with zero population.
#[derive(Debug, Clone, PartialEq)]
pub struct CensusRaster {
    pub spec: GridSpec,
    pub population: Vec<f64>,
    pub zoning: Vec<Zoning>,
}

pub fn rasterize_census(census: &[CensusBlock], spec: &GridSpec) -> CensusRaster {
    let n = spec.len();
    let mut assigned = vec![false; n];
    let mut population = vec![0.0; n];
    let mut zoning = vec![Zoning::Residential; n];
    let b = spec.bbox;
    for block in census {
        let (x0, y0, x1, y1) = ring_extent(&block.ring);
        let cols = crate::geometry::raster_center_span(x0, x1, b.x_min, spec.resolution, spec.n_cols);
        let rows = crate::geometry::raster_center_span(y0, y1, b.y_min, spec.resolution, spec.n_rows);
        let (Some((c0, c1)), Some((r0, r1))) = (cols, rows) else { continue };
        for row in r0..=r1 {
            for col in c0..=c1 {
                let cell = Cell::new(col, row);
                let i = spec.linear(cell);
                if !assigned[i] && contains_point(&block.ring, spec.cell_center(cell)) {
                    assigned[i] = true;
                    population[i] = block.population as f64;
                    zoning[i] = block.zoning;
                }
            }
        }
    }
    CensusRaster { spec: *spec, population, zoning }
}

/// Population cost layer (`c_pop = m_pop`), normalized by the maximum
/// modified population over the grid for the same time of day.
pub fn population_layer(raster: &CensusRaster, when: DayNight, gammas: &Gammas, altitude: f64) -> GridLayer {
    let modified: Vec<f64> =
        raster.population.iter().zip(&raster.zoning).map(|(&p, &z)| modified_population(p, z, when, gammas)).collect();
    let norm = modified.iter().copied().fold(0.0, f64::max);
    let values = modified.into_iter().map(|p| population_metric(p, norm)).collect();
    GridLayer { name: "population".into(), spec: raster.spec, altitude, values }
}
