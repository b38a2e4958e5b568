//! Point-to-point, grid A* and BIT* planners over a [`MetricMapSet`].

mod astar;
mod bitstar;
mod heuristic;
mod ptp;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use astar::astar;
pub use bitstar::bitstar;
pub use heuristic::{h_plus, octile_distance, HeuristicKind, HeuristicTable, SpanMode};
pub use ptp::plan_ptp;

use crate::cost::{path_cost, PathCostBreakdown, State, WeightVector};
use crate::error::{Error, Result};
use crate::geometry::{trace_segment, Cell};
use crate::maps::MetricMapSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Ptp,
    AstarDist,
    AstarPlus,
    BitstarDist,
    BitstarPlus,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] =
        [Algorithm::Ptp, Algorithm::AstarDist, Algorithm::AstarPlus, Algorithm::BitstarDist, Algorithm::BitstarPlus];

    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Ptp => "ptp",
            Algorithm::AstarDist => "astar_dist",
            Algorithm::AstarPlus => "astar_plus",
            Algorithm::BitstarDist => "bitstar_dist",
            Algorithm::BitstarPlus => "bitstar_plus",
        }
    }

    pub fn id(&self) -> u64 {
        Self::ALL.iter().position(|a| a == self).unwrap() as u64
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BitStarParams {
    /// Maximum number of batches.
    pub batches: usize,
    /// Samples drawn per batch.
    pub samples: usize,
    pub seed: u64,
    /// Stop once a batch improves the incumbent by less than this fraction.
    pub eps_stop: f64,
    /// Connection radius scale.
    pub eta: f64,
}

impl Default for BitStarParams {
    fn default() -> Self {
        Self { batches: 5, samples: 200, seed: 0, eps_stop: 1e-3, eta: 1.1 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PlanProblem<'a> {
    pub start: [f64; 2],
    pub goal: [f64; 2],
    pub maps: &'a MetricMapSet,
    pub weights: WeightVector,
    pub bitstar: BitStarParams,
    pub deadline: Duration,
    /// Row/column extent used by the layer term of the plus heuristic.
    pub span: SpanMode,
}

impl<'a> PlanProblem<'a> {
    pub fn new(maps: &'a MetricMapSet, start: [f64; 2], goal: [f64; 2], weights: WeightVector) -> Self {
        Self {
            start,
            goal,
            maps,
            weights,
            bitstar: BitStarParams::default(),
            deadline: Duration::from_secs(180),
            span: SpanMode::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let spec = self.maps.spec();
        spec.world_to_index(self.start[0], self.start[1])?;
        spec.world_to_index(self.goal[0], self.goal[1])?;
        self.weights.validate()?;
        if self.deadline.is_zero() {
            return Err(Error::Precondition("deadline must be positive".into()));
        }
        if self.bitstar.samples < 2 || self.bitstar.batches < 1 {
            return Err(Error::Precondition("BIT* needs samples >= 2 and batches >= 1".into()));
        }
        Ok(())
    }

    pub fn start_cell(&self) -> Result<Cell> {
        self.maps.spec().world_to_index(self.start[0], self.start[1])
    }

    pub fn goal_cell(&self) -> Result<Cell> {
        self.maps.spec().world_to_index(self.goal[0], self.goal[1])
    }

    fn endpoints_free(&self) -> Result<bool> {
        Ok(self.maps.is_free(self.start_cell()?) && self.maps.is_free(self.goal_cell()?))
    }

    fn state(&self, p: [f64; 2]) -> State {
        State::new(p[0], p[1], self.maps.altitude())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanStatus {
    Solved,
    InfeasibleStartGoal,
    NoPath,
    Timeout,
}

impl fmt::Display for PlanStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlanStatus::Solved => "solved",
            PlanStatus::InfeasibleStartGoal => "infeasible_start_goal",
            PlanStatus::NoPath => "no_path",
            PlanStatus::Timeout => "timeout",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    pub algorithm: Algorithm,
    pub status: PlanStatus,
    pub path: Vec<State>,
    pub breakdown: PathCostBreakdown,
    pub expanded_nodes: usize,
    pub samples_drawn: usize,
    pub batches_completed: usize,
    /// Best cost after each completed batch (BIT* only); `None` before the
    /// first solution.
    pub incumbent_history: Vec<Option<f64>>,
    pub elapsed_s: f64,
}

impl PlanResult {
    pub(crate) fn empty(algorithm: Algorithm, status: PlanStatus) -> Self {
        Self {
            algorithm,
            status,
            path: Vec::new(),
            breakdown: PathCostBreakdown::default(),
            expanded_nodes: 0,
            samples_drawn: 0,
            batches_completed: 0,
            incumbent_history: Vec::new(),
            elapsed_s: 0.0,
        }
    }

    pub(crate) fn solved(algorithm: Algorithm, path: Vec<State>, problem: &PlanProblem) -> Result<Self> {
        let breakdown = path_cost(&path, problem.maps, &problem.weights)?;
        Ok(Self { path, breakdown, ..Self::empty(algorithm, PlanStatus::Solved) })
    }

    pub fn is_solved(&self) -> bool {
        self.status == PlanStatus::Solved
    }

    pub fn total(&self) -> Option<f64> {
        self.is_solved().then_some(self.breakdown.total)
    }

    /// Copy with wall-clock timing cleared, for reproducibility checks.
    pub fn without_timing(&self) -> Self {
        Self { elapsed_s: 0.0, ..self.clone() }
    }
}

/// Wall-clock budget shared by the planners.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Deadline {
    start: Instant,
    budget: Duration,
}

impl Deadline {
    pub fn new(budget: Duration) -> Self {
        Self { start: Instant::now(), budget }
    }

    pub fn expired(&self) -> bool {
        self.start.elapsed() >= self.budget
    }

    pub fn elapsed_s(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }
}

/// Runs the selected planner.
pub fn plan(problem: &PlanProblem, algo: Algorithm) -> Result<PlanResult> {
    match algo {
        Algorithm::Ptp => plan_ptp(problem),
        Algorithm::AstarDist => astar(problem, HeuristicKind::Dist),
        Algorithm::AstarPlus => astar(problem, HeuristicKind::Plus),
        Algorithm::BitstarDist => bitstar(problem, HeuristicKind::Dist),
        Algorithm::BitstarPlus => bitstar(problem, HeuristicKind::Plus),
    }
}

/// Independent feasibility check: every segment traced against the
/// obstacle layer, endpoints in the start and goal cells. Returns the first
/// offending cell, if any.
pub fn validate_path(path: &[State], problem: &PlanProblem) -> Result<Option<Cell>> {
    let spec = problem.maps.spec();
    let (Some(first), Some(last)) = (path.first(), path.last()) else {
        return Err(Error::Precondition("empty path".into()));
    };
    if spec.world_to_index(first.x, first.y)? != problem.start_cell()?
        || spec.world_to_index(last.x, last.y)? != problem.goal_cell()?
    {
        return Err(Error::Precondition("path does not connect start and goal cells".into()));
    }
    let mut cells = vec![spec.world_to_index(first.x, first.y)?];
    for seg in path.windows(2) {
        cells.extend(trace_segment(seg[0].xy(), seg[1].xy(), spec)?);
    }
    if let Some(c) = cells.into_iter().find(|&c| !problem.maps.is_free(c)) {
        return Ok(Some(c));
    }
    Ok(None)
}
