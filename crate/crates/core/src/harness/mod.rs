//! Monte Carlo comparison of the planners over sampled instances and
//! weights.
//!
//! Every run gets its own seed derived from the master seed, the instance
//! and the planner, so the record set does not depend on the worker count.
//! Wall-clock timings are the only nondeterministic output and are kept out
//! of the records file.

mod summary;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use summary::{summarize, PlannerSummary, Summary};

use crate::cost::WeightVector;
use crate::error::{Error, Result};
use crate::geometry::Cell;
use crate::maps::{build_map_set, DayNight, MapConfig, MetricMapSet};
use crate::planner::{plan, Algorithm, BitStarParams, PlanProblem, PlanStatus, SpanMode};
use crate::world::{load_scene_file, synth_scene, SynthConfig, WorldScene};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SceneSource {
    File(PathBuf),
    Synth(SynthConfig),
}

impl Default for SceneSource {
    fn default() -> Self {
        SceneSource::Synth(SynthConfig::default())
    }
}

impl SceneSource {
    pub fn load(&self) -> Result<WorldScene> {
        match self {
            SceneSource::File(path) => load_scene_file(path),
            SceneSource::Synth(cfg) => synth_scene(cfg),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub scene: SceneSource,
    pub resolutions: Vec<f64>,
    pub altitudes: Vec<f64>,
    pub day_night: DayNight,
    pub maps: MapConfig,
    pub instance_count: usize,
    pub seed: u64,
    pub planners: Vec<Algorithm>,
    /// Per-run seeds override `bitstar.seed`.
    pub bitstar: BitStarParams,
    pub span: SpanMode,
    pub deadline_s: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scene: SceneSource::default(),
            resolutions: vec![5.0],
            altitudes: vec![20.0],
            day_night: DayNight::Day,
            maps: MapConfig::default(),
            instance_count: 10,
            seed: 0,
            planners: Algorithm::ALL.to_vec(),
            bitstar: BitStarParams::default(),
            span: SpanMode::default(),
            deadline_s: 180.0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.instance_count == 0 {
            return Err(Error::Precondition("instance_count must be at least 1".into()));
        }
        if !(self.deadline_s > 0.0 && self.deadline_s.is_finite()) {
            return Err(Error::Precondition("deadline_s must be positive".into()));
        }
        if self.resolutions.is_empty() || self.altitudes.is_empty() || self.planners.is_empty() {
            return Err(Error::Precondition("resolutions, altitudes and planners must be non-empty".into()));
        }
        self.maps.validate()
    }
}

/// One row per (scenario, instance, planner).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub scenario: usize,
    pub resolution: f64,
    pub altitude: f64,
    pub instance: usize,
    pub planner: Algorithm,
    pub seed: u64,
    pub start_x: f64,
    pub start_y: f64,
    pub goal_x: f64,
    pub goal_y: f64,
    pub w_distance: f64,
    pub w_gps: f64,
    pub w_lidar: f64,
    pub w_population: f64,
    pub w_risk: f64,
    pub status: PlanStatus,
    pub total: Option<f64>,
    pub distance_m: Option<f64>,
    pub gps: Option<f64>,
    pub lidar: Option<f64>,
    pub population: Option<f64>,
    pub risk: Option<f64>,
    pub expanded_nodes: usize,
    pub samples_drawn: usize,
    pub batches_completed: usize,
    #[serde(skip)]
    pub elapsed_s: f64,
}

impl InstanceRecord {
    pub fn is_solved(&self) -> bool {
        self.status == PlanStatus::Solved
    }

    pub fn weights(&self) -> WeightVector {
        WeightVector {
            distance: self.w_distance,
            gps: self.w_gps,
            lidar: self.w_lidar,
            population: self.w_population,
            risk: self.w_risk,
        }
    }
}

/// Maps built for one (resolution, altitude) pair.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub resolution: f64,
    pub altitude: f64,
    pub maps: MetricMapSet,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for one run, mixed so that nearby ids give unrelated streams.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix64(master), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// `n` start/goal pairs at free cell centers. Starts cycle through the four
/// bbox quadrants; each goal is drawn from a different quadrant than its
/// start where one has free cells.
pub fn sample_instances(maps: &MetricMapSet, n: usize, seed: u64) -> Result<Vec<([f64; 2], [f64; 2])>> {
    let spec = maps.spec();
    let (cx, cy) = ((spec.n_cols as f64) / 2.0, (spec.n_rows as f64) / 2.0);
    let mut quadrants: [Vec<Cell>; 4] = Default::default();
    for cell in spec.cells().filter(|&c| maps.is_free(c)) {
        let east = (cell.col as f64 + 0.5) >= cx;
        let north = (cell.row as f64 + 0.5) >= cy;
        quadrants[(east as usize) | ((north as usize) << 1)].push(cell);
    }
    if quadrants.iter().all(Vec::is_empty) {
        return Err(Error::EmptyDomain);
    }
    let nonempty = |q: usize| (0..4).map(|k| (q + k) % 4).find(|&k| !quadrants[k].is_empty()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let qs = nonempty(i % 4);
        let mut qg = nonempty((qs + 1 + (i / 4) % 3) % 4);
        if qg == qs {
            qg = nonempty((qs + 1) % 4);
        }
        let s = *quadrants[qs].choose(&mut rng).unwrap();
        let g = *quadrants[qg].choose(&mut rng).unwrap();
        out.push((spec.cell_center(s), spec.cell_center(g)));
    }
    Ok(out)
}

/// `w0 ~ U[0.1, 1]`, the layer weights `~ U[0, 1]`, scaled to sum to 1.
pub fn sample_weights(seed: u64) -> WeightVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = [0.0; 5];
    w[0] = rng.gen_range(0.1..=1.0);
    for v in &mut w[1..] {
        *v = rng.gen_range(0.0..=1.0);
    }
    let sum: f64 = w.iter().sum();
    WeightVector { distance: w[0] / sum, gps: w[1] / sum, lidar: w[2] / sum, population: w[3] / sum, risk: w[4] / sum }
}

pub fn prepare_scenarios(config: &ExperimentConfig, scene: &WorldScene) -> Result<Vec<Scenario>> {
    let mut out = Vec::new();
    for &resolution in &config.resolutions {
        for &altitude in &config.altitudes {
            log::info!("building maps at {resolution} m, {altitude} m altitude");
            let maps = build_map_set(scene, resolution, altitude, config.day_night, &config.maps)?;
            out.push(Scenario { resolution, altitude, maps });
        }
    }
    Ok(out)
}

struct Job {
    scenario: usize,
    instance: usize,
    start: [f64; 2],
    goal: [f64; 2],
    weights: WeightVector,
    planner: Algorithm,
}

/// Runs every (scenario, instance, planner) combination on a pool of
/// `workers` threads. Records come back sorted by scenario, instance and
/// planner.
pub fn run_scenarios(config: &ExperimentConfig, scenarios: &[Scenario], workers: usize) -> Result<Vec<InstanceRecord>> {
    config.validate()?;
    let mut jobs = Vec::new();
    for (si, sc) in scenarios.iter().enumerate() {
        let pairs = sample_instances(&sc.maps, config.instance_count, derive_seed(config.seed, &[si as u64]))?;
        for (ii, (start, goal)) in pairs.into_iter().enumerate() {
            let weights = sample_weights(derive_seed(config.seed, &[si as u64, ii as u64]));
            for &planner in &config.planners {
                jobs.push(Job { scenario: si, instance: ii, start, goal, weights, planner });
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Precondition(format!("worker pool: {e}")))?;
    let mut records =
        pool.install(|| jobs.par_iter().map(|job| run_job(config, scenarios, job)).collect::<Result<Vec<_>>>())?;
    records.sort_by_key(|r| (r.scenario, r.instance, r.planner));
    Ok(records)
}

fn run_job(config: &ExperimentConfig, scenarios: &[Scenario], job: &Job) -> Result<InstanceRecord> {
    let sc = &scenarios[job.scenario];
    let seed = derive_seed(config.seed, &[job.scenario as u64, job.instance as u64, job.planner.id()]);
    let mut problem = PlanProblem::new(&sc.maps, job.start, job.goal, job.weights);
    problem.bitstar = BitStarParams { seed, ..config.bitstar };
    problem.span = config.span;
    problem.deadline = Duration::from_secs_f64(config.deadline_s);
    let r = plan(&problem, job.planner)?;
    let b = r.is_solved().then_some(r.breakdown);
    Ok(InstanceRecord {
        scenario: job.scenario,
        resolution: sc.resolution,
        altitude: sc.altitude,
        instance: job.instance,
        planner: job.planner,
        seed,
        start_x: job.start[0],
        start_y: job.start[1],
        goal_x: job.goal[0],
        goal_y: job.goal[1],
        w_distance: job.weights.distance,
        w_gps: job.weights.gps,
        w_lidar: job.weights.lidar,
        w_population: job.weights.population,
        w_risk: job.weights.risk,
        status: r.status,
        total: b.map(|b| b.total),
        distance_m: b.map(|b| b.distance_m),
        gps: b.map(|b| b.gps),
        lidar: b.map(|b| b.lidar),
        population: b.map(|b| b.population),
        risk: b.map(|b| b.risk),
        expanded_nodes: r.expanded_nodes,
        samples_drawn: r.samples_drawn,
        batches_completed: r.batches_completed,
        elapsed_s: r.elapsed_s,
    })
}

/// Loads the scene, builds the maps and runs all planners.
pub fn run_experiment(config: &ExperimentConfig, workers: usize) -> Result<Vec<InstanceRecord>> {
    config.validate()?;
    let scene = config.scene.load()?;
    let scenarios = prepare_scenarios(config, &scene)?;
    run_scenarios(config, &scenarios, workers)
}

pub fn records_csv(records: &[InstanceRecord]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

pub fn timings_csv(records: &[InstanceRecord]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["scenario", "instance", "planner", "elapsed_s"])?;
    for r in records {
        w.write_record([
            r.scenario.to_string(),
            r.instance.to_string(),
            r.planner.to_string(),
            r.elapsed_s.to_string(),
        ])?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// Writes `records.csv`, `timings.csv` and `summary.json` into `dir`.
pub fn write_outputs(dir: &Path, config: &ExperimentConfig, records: &[InstanceRecord]) -> Result<Summary> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("records.csv"), records_csv(records)?)?;
    fs::write(dir.join("timings.csv"), timings_csv(records)?)?;
    let summary = summarize(records);
    let doc = serde_json::json!({ "config": config, "summary": summary });
    fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&doc)? + "\n")?;
    Ok(summary)
}
