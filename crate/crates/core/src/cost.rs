//! Weighted multi-objective transition and path costs.
//!
//! A transition pays `w0` per meter flown plus, for every cell it enters,
//! the weighted cost-layer values of that cell. The cell a transition leaves
//! is never charged.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{trace_segment, Cell};
use crate::maps::MetricMapSet;

/// Weights `(w0, w_gps, w_lidar, w_pop, w_risk)`; `w0` is per meter, the
/// others per cell entered.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub distance: f64,
    pub gps: f64,
    pub lidar: f64,
    pub population: f64,
    pub risk: f64,
}

impl WeightVector {
    pub fn new(distance: f64, gps: f64, lidar: f64, population: f64, risk: f64) -> Result<Self> {
        let w = Self { distance, gps, lidar, population, risk };
        w.validate()?;
        Ok(w)
    }

    pub const fn distance_only() -> Self {
        Self { distance: 1.0, gps: 0.0, lidar: 0.0, population: 0.0, risk: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let all = self.as_array();
        if all.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Precondition(format!("weights must be finite and >= 0: {all:?}")));
        }
        if all.iter().all(|&w| w == 0.0) {
            return Err(Error::Precondition("at least one weight must be positive".into()));
        }
        Ok(())
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.distance, self.gps, self.lidar, self.population, self.risk]
    }

    /// Weights of the four cost layers in [`MetricMapSet::cost_layers`] order.
    pub fn layer_weights(&self) -> [f64; 4] {
        [self.gps, self.lidar, self.population, self.risk]
    }
}

impl FromStr for WeightVector {
    type Err = Error;

    /// Parses `w0,wgps,wlidar,wpop,wrisk`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Precondition(format!("bad weight list {s:?}: {e}")))?;
        let [a, b, c, d, e] = parts[..] else {
            return Err(Error::Precondition(format!("expected 5 weights, got {}", parts.len())));
        };
        Self::new(a, b, c, d, e)
    }
}

/// A vehicle position at the planning altitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl State {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn xy(&self) -> [f64; 2] {
        [self.x, self.y]
    }

    pub fn distance(&self, other: &State) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2) + (self.z - other.z).powi(2)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PathCostBreakdown {
    /// `w0·distance_m + Σ w_j·layer_j`.
    pub total: f64,
    pub distance_m: f64,
    /// Unweighted accumulated layer costs.
    pub gps: f64,
    pub lidar: f64,
    pub population: f64,
    pub risk: f64,
    pub cells_visited: usize,
}

impl PathCostBreakdown {
    pub fn layers(&self) -> [f64; 4] {
        [self.gps, self.lidar, self.population, self.risk]
    }

    fn from_parts(distance_m: f64, layers: [f64; 4], cells_visited: usize, w: &WeightVector) -> Self {
        let total = weighted(w, distance_m, &layers);
        Self {
            total,
            distance_m,
            gps: layers[0],
            lidar: layers[1],
            population: layers[2],
            risk: layers[3],
            cells_visited,
        }
    }
}

/// `w0·distance + w1·l1 + … + w4·l4`, summed left to right.
pub fn weighted(w: &WeightVector, distance: f64, layers: &[f64; 4]) -> f64 {
    w.layer_weights().iter().zip(layers).fold(w.distance * distance, |acc, (wj, lj)| acc + wj * lj)
}

/// Cost of one move between adjacent states: distance plus the destination
/// cell's weighted layer costs.
pub fn transition_cost(from: &State, to: &State, maps: &MetricMapSet, w: &WeightVector) -> Result<f64> {
    let spec = maps.spec();
    spec.world_to_index(from.x, from.y)?;
    let cell = spec.world_to_index(to.x, to.y)?;
    if !maps.is_free(cell) {
        return Err(Error::InfeasibleTransition { col: cell.col, row: cell.row });
    }
    let costs = maps.cell_costs(cell);
    Ok(weighted(w, from.distance(to), &costs))
}

pub fn path_distance(path: &[State]) -> f64 {
    path.windows(2).map(|p| p[0].distance(&p[1])).sum()
}

/// Cells entered along a straight segment (all traced cells after the
/// first). Fails on the first occupied cell, the starting cell included.
pub fn entered_cells(a: [f64; 2], b: [f64; 2], maps: &MetricMapSet) -> Result<Vec<Cell>> {
    let cells = trace_segment(a, b, maps.spec())?;
    if let Some(c) = cells.iter().find(|&&c| !maps.is_free(c)) {
        return Err(Error::InfeasibleTransition { col: c.col, row: c.row });
    }
    Ok(cells[1..].to_vec())
}

/// Full cost of a polyline. Each segment is expanded into the cells it
/// crosses so continuous and grid paths are charged consistently.
pub fn path_cost(path: &[State], maps: &MetricMapSet, w: &WeightVector) -> Result<PathCostBreakdown> {
    let Some(first) = path.first() else {
        return Err(Error::Precondition("path has no states".into()));
    };
    let start = maps.spec().world_to_index(first.x, first.y)?;
    if !maps.is_free(start) {
        return Err(Error::InfeasibleTransition { col: start.col, row: start.row });
    }
    let mut layers = [0.0; 4];
    let mut visited = 0;
    for seg in path.windows(2) {
        for cell in entered_cells(seg[0].xy(), seg[1].xy(), maps)? {
            let c = maps.cell_costs(cell);
            for j in 0..4 {
                layers[j] += c[j];
            }
            visited += 1;
        }
    }
    Ok(PathCostBreakdown::from_parts(path_distance(path), layers, visited, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_util::random_maps;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn center(maps: &MetricMapSet, col: usize, row: usize) -> State {
        let [x, y] = maps.spec().cell_center(Cell::new(col, row));
        State::new(x, y, 20.0)
    }

    #[test]
    fn diagonal_distance_only() {
        let maps = random_maps(1, 10, 5.0, 0.0);
        let c =
            transition_cost(&center(&maps, 2, 2), &center(&maps, 3, 3), &maps, &WeightVector::distance_only()).unwrap();
        assert!((c - 7.0711).abs() < 1e-4);
    }

    #[test]
    fn single_layer_pull() {
        let mut maps = random_maps(1, 10, 5.0, 0.0);
        maps.gps.set(Cell::new(3, 2), 0.3);
        let w = WeightVector::new(0.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let c = transition_cost(&center(&maps, 2, 2), &center(&maps, 3, 2), &maps, &w).unwrap();
        assert_eq!(c, 0.3);
    }

    #[test]
    fn occupied_destination_is_infeasible() {
        let mut maps = random_maps(1, 10, 5.0, 0.0);
        maps.obstacle.set(Cell::new(3, 2), 1.0);
        let err = transition_cost(&center(&maps, 2, 2), &center(&maps, 3, 2), &maps, &WeightVector::distance_only());
        assert!(matches!(err, Err(Error::InfeasibleTransition { col: 3, row: 2 })));
    }

    #[test]
    fn random_transitions_match_formula() {
        let maps = random_maps(3, 12, 5.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let w = WeightVector::new(rng.gen(), rng.gen(), rng.gen(), rng.gen(), rng.gen()).unwrap();
            let a = State::new(rng.gen_range(0.0..60.0), rng.gen_range(0.0..60.0), 20.0);
            let b = State::new(rng.gen_range(0.0..60.0), rng.gen_range(0.0..60.0), 20.0);
            let cell = maps.spec().world_to_index(b.x, b.y).unwrap();
            let i = cell.row * 12 + cell.col;
            let expect = w.distance * ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt()
                + w.gps * maps.gps.values[i]
                + w.lidar * maps.lidar.values[i]
                + w.population * maps.population.values[i]
                + w.risk * maps.risk.values[i];
            assert_eq!(transition_cost(&a, &b, &maps, &w).unwrap(), expect);
        }
    }

    #[test]
    fn path_examples() {
        let maps = random_maps(1, 10, 5.0, 0.0);
        let w = WeightVector::distance_only();
        let one = [center(&maps, 0, 0)];
        assert_eq!(path_cost(&one, &maps, &w).unwrap().total, 0.0);
        let three = [center(&maps, 0, 0), center(&maps, 1, 0), center(&maps, 2, 0)];
        assert_eq!(path_cost(&three, &maps, &w).unwrap().total, 10.0);
        assert_eq!(path_distance(&[State::new(0.0, 0.0, 0.0), State::new(3.0, 4.0, 0.0)]), 5.0);
        assert_eq!(path_distance(&one), 0.0);
    }

    #[test]
    fn grid_path_cost_equals_sum_of_transitions() {
        let maps = random_maps(4, 10, 5.0, 0.0);
        let w = WeightVector::new(0.3, 0.2, 0.1, 0.25, 0.15).unwrap();
        let cells = [(0, 0), (1, 1), (2, 1), (3, 2), (3, 3), (2, 4)];
        let path: Vec<State> = cells.iter().map(|&(c, r)| center(&maps, c, r)).collect();
        let bd = path_cost(&path, &maps, &w).unwrap();
        let sum: f64 = path.windows(2).map(|p| transition_cost(&p[0], &p[1], &maps, &w).unwrap()).sum();
        assert!((bd.total - sum).abs() <= 1e-12 * sum);
        assert_eq!(bd.cells_visited, 5);
        let lw = w.layer_weights();
        let recomposed = w.distance * bd.distance_m + (0..4).map(|j| lw[j] * bd.layers()[j]).sum::<f64>();
        assert!((bd.total - recomposed).abs() <= 1e-9 * bd.total);
    }

    /// Independent accumulation: walk each segment cell by cell.
    #[test]
    fn random_polyline_matches_cellwise_accumulation() {
        let maps = random_maps(6, 20, 5.0, 0.0);
        let w = WeightVector::new(0.5, 0.1, 0.2, 0.3, 0.4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let path: Vec<State> =
                (0..6).map(|_| State::new(rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0), 20.0)).collect();
            let bd = path_cost(&path, &maps, &w).unwrap();
            let mut total = 0.0;
            for seg in path.windows(2) {
                total += w.distance * seg[0].distance(&seg[1]);
                let cells = trace_segment(seg[0].xy(), seg[1].xy(), maps.spec()).unwrap();
                for c in &cells[1..] {
                    let v = maps.cell_costs(*c);
                    total += w.gps * v[0] + w.lidar * v[1] + w.population * v[2] + w.risk * v[3];
                }
            }
            assert!((bd.total - total).abs() <= 1e-9 * total.max(1.0));
        }
    }

    #[test]
    fn blocked_polyline_names_cell() {
        let mut maps = random_maps(6, 20, 5.0, 0.0);
        maps.obstacle.set(Cell::new(10, 0), 1.0);
        let path = [State::new(2.5, 2.5, 20.0), State::new(97.5, 2.5, 20.0)];
        assert!(matches!(
            path_cost(&path, &maps, &WeightVector::distance_only()),
            Err(Error::InfeasibleTransition { col: 10, row: 0 })
        ));
    }

    #[test]
    fn weight_parsing() {
        let w: WeightVector = "1,0,0,0.5,0".parse().unwrap();
        assert_eq!(w.as_array(), [1.0, 0.0, 0.0, 0.5, 0.0]);
        assert!("1,0,0".parse::<WeightVector>().is_err());
        assert!("0,0,0,0,0".parse::<WeightVector>().is_err());
        assert!("1,-1,0,0,0".parse::<WeightVector>().is_err());
    }
}
