//! Command-line front end: scene synthesis and validation, map generation,
//! single plans, Monte Carlo experiments and rendering.
//!
//! Exit codes: 0 success, 1 the planner found no path or timed out (results
//! are still written), 2 usage or configuration error, 3 data error.

mod settings;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use uasmap::cost::{State, WeightVector};
use uasmap::harness::{run_experiment, write_outputs};
use uasmap::maps::{build_map_set, DayNight, MetricMapSet};
use uasmap::planner::{plan, Algorithm, PlanProblem, PlanResult, SpanMode};
use uasmap::render::render_ppm;
use uasmap::world::{parse_scene, save_scene_file, synth_scene, validate_scene, BoundingBox, SynthConfig};

use settings::Settings;

const SUPPORTED_RESOLUTIONS: [f64; 3] = [2.0, 5.0, 10.0];

#[derive(Parser)]
#[command(name = "uasmap", version, about = "Urban metric maps and multicopter path planning")]
struct Cli {
    /// Worker threads for map generation and experiments.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// JSON settings file; flags take precedence over its values.
    #[arg(long, global = true, env = "UASMAP_CONFIG")]
    config: Option<PathBuf>,

    /// More log output (-v debug, -vv trace).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic street-grid city scene.
    Synth(SynthArgs),
    /// Check a scene document and list every violation.
    Validate {
        #[arg(long)]
        scene: PathBuf,
    },
    /// Build the five metric layers for one resolution and altitude.
    GenMaps(GenMapsArgs),
    /// Plan one path over a generated map set.
    Plan(PlanArgs),
    /// Run the Monte Carlo comparison described by `--config`.
    Montecarlo {
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw the normalized total cost as a PPM image with optional paths.
    Render(RenderArgs),
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Side length of the square city in meters.
    #[arg(long, default_value_t = 320.0)]
    size: f64,
    #[arg(long, default_value_t = 20)]
    obstacles: usize,
    #[arg(long, default_value_t = 10)]
    satellites: usize,
}

#[derive(Args)]
struct GenMapsArgs {
    #[arg(long)]
    scene: PathBuf,
    /// Cell size in meters: 2, 5 or 10.
    #[arg(long)]
    res: Option<f64>,
    /// Flight altitude in meters.
    #[arg(long)]
    alt: Option<f64>,
    #[arg(long, conflicts_with = "night")]
    day: bool,
    #[arg(long)]
    night: bool,
    /// Distance at which proximity risk vanishes, in meters.
    #[arg(long)]
    d_thresh: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    maps: PathBuf,
    /// ptp, astar_dist, astar_plus, bitstar_dist or bitstar_plus.
    #[arg(long)]
    algo: Option<Algorithm>,
    #[arg(long, value_parser = parse_point)]
    start: [f64; 2],
    #[arg(long, value_parser = parse_point)]
    goal: [f64; 2],
    /// w0,wgps,wlidar,wpop,wrisk
    #[arg(long)]
    weights: Option<WeightVector>,
    /// Seconds.
    #[arg(long)]
    deadline: Option<f64>,
    #[arg(long)]
    batches: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Column/row extent of the plus heuristic: full-span or aabb.
    #[arg(long, value_parser = parse_span)]
    span: Option<SpanMode>,
    /// Result file; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    maps: PathBuf,
    /// Plan result documents to overlay; may repeat.
    #[arg(long)]
    path: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Pixels per cell.
    #[arg(long, default_value_t = 4)]
    scale: usize,
}

fn parse_point(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    let [x, y] = parts.as_slice() else { return Err(format!("expected x,y but got {s:?}")) };
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok([num(x)?, num(y)?])
}

fn parse_span(s: &str) -> Result<SpanMode, String> {
    match s {
        "full-span" | "full_span" => Ok(SpanMode::FullSpan),
        "aabb" => Ok(SpanMode::Aabb),
        _ => Err(format!("unknown span mode {s:?}")),
    }
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn usage(error: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 2, error: error.into() }
}

fn data(error: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 3, error: error.into() }
}

impl From<uasmap::Error> for Failure {
    fn from(e: uasmap::Error) -> Self {
        use uasmap::Error::*;
        match e {
            Precondition(_) | OutOfBounds { .. } | Capacity { .. } => usage(e),
            _ => data(e),
        }
    }
}

impl Failure {
    fn context(mut self, what: String) -> Self {
        self.error = self.error.context(what);
        self
    }
}

type Outcome = Result<u8, Failure>;

fn load_maps(dir: &Path) -> Result<MetricMapSet, Failure> {
    MetricMapSet::load(dir).map_err(|e| Failure::from(e).context(format!("loading maps from {}", dir.display())))
}

fn log_resolved(what: &str, value: &impl Serialize) {
    match serde_json::to_string(value) {
        Ok(json) => log::info!("{what} config: {json}"),
        Err(e) => log::warn!("could not echo {what} config: {e}"),
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(data)? + "\n";
    fs::write(path, text).with_context(|| format!("writing {}", path.display())).map_err(data)
}

fn synth(args: SynthArgs) -> Outcome {
    let cfg = SynthConfig {
        bbox: BoundingBox::new(0.0, 0.0, args.size, args.size),
        obstacle_count: args.obstacles,
        satellite_count: args.satellites,
        seed: args.seed,
        ..SynthConfig::default()
    };
    log_resolved("synth", &cfg);
    let scene = synth_scene(&cfg)?;
    save_scene_file(&scene, &args.out)?;
    Ok(0)
}

fn validate(scene: &Path) -> Outcome {
    let text = fs::read_to_string(scene).with_context(|| format!("reading {}", scene.display())).map_err(data)?;
    let parsed = parse_scene(&text)?;
    let violations = validate_scene(&parsed);
    for v in &violations {
        println!("{}: {:?}: {}", v.feature, v.kind, v.message);
    }
    if violations.is_empty() {
        println!(
            "ok: {} obstacles, {} census blocks, {} satellites",
            parsed.obstacles.len(),
            parsed.census.len(),
            parsed.satellites.len()
        );
        Ok(0)
    } else {
        Err(data(anyhow!("{} violation(s)", violations.len())))
    }
}

fn gen_maps(args: GenMapsArgs, settings: &Settings) -> Outcome {
    let resolution = args.res.unwrap_or(settings.gen_maps.resolution);
    if !SUPPORTED_RESOLUTIONS.contains(&resolution) {
        return Err(usage(anyhow!("--res must be one of 2, 5, 10 (got {resolution})")));
    }
    let altitude = args.alt.unwrap_or(settings.gen_maps.altitude);
    let day_night = match (args.day, args.night) {
        (true, _) => DayNight::Day,
        (_, true) => DayNight::Night,
        _ => settings.gen_maps.day_night,
    };
    let mut cfg = settings.maps;
    if let Some(d) = args.d_thresh {
        cfg.d_thresh = d;
    }
    cfg.validate()?;
    log_resolved(
        "gen-maps",
        &serde_json::json!({ "resolution": resolution, "altitude": altitude, "day_night": day_night, "maps": cfg }),
    );
    let scene = uasmap::world::load_scene_file(&args.scene)
        .map_err(|e| Failure::from(e).context(format!("loading scene {}", args.scene.display())))?;
    let maps = build_map_set(&scene, resolution, altitude, day_night, &cfg)?;
    maps.save(&args.out)?;
    log::info!("wrote maps to {}", args.out.display());
    Ok(0)
}

fn run_plan(args: PlanArgs, settings: &Settings) -> Outcome {
    let mut ps = settings.plan.clone();
    if let Some(a) = args.algo {
        ps.algo = a;
    }
    if let Some(w) = args.weights {
        ps.weights = w;
    }
    if let Some(d) = args.deadline {
        ps.deadline_s = d;
    }
    if let Some(b) = args.batches {
        ps.bitstar.batches = b;
    }
    if let Some(s) = args.samples {
        ps.bitstar.samples = s;
    }
    if let Some(s) = args.seed {
        ps.bitstar.seed = s;
    }
    if let Some(s) = args.span {
        ps.span = s;
    }
    if !(ps.deadline_s > 0.0 && ps.deadline_s.is_finite()) {
        return Err(usage(anyhow!("deadline must be a positive number of seconds")));
    }
    log_resolved("plan", &ps);
    let maps = load_maps(&args.maps)?;
    let mut problem = PlanProblem::new(&maps, args.start, args.goal, ps.weights);
    problem.deadline = Duration::from_secs_f64(ps.deadline_s);
    problem.bitstar = ps.bitstar;
    problem.span = ps.span;
    let result = plan(&problem, ps.algo)?;
    match &args.out {
        Some(path) => write_json(path, &result)?,
        None => println!("{}", serde_json::to_string_pretty(&result).map_err(data)?),
    }
    if result.is_solved() {
        Ok(0)
    } else {
        log::warn!("{}: {}", ps.algo, result.status);
        Ok(1)
    }
}

fn montecarlo(out: &Path, settings: &Settings, config_given: bool, threads: usize) -> Outcome {
    if !config_given {
        return Err(usage(anyhow!("montecarlo needs --config FILE (or UASMAP_CONFIG)")));
    }
    let cfg = &settings.experiment;
    cfg.validate()?;
    log_resolved("experiment", cfg);
    let records = run_experiment(cfg, threads)?;
    let summary = write_outputs(out, cfg, &records)?;
    for p in &summary.planners {
        log::info!("{}: solved {}/{}", p.planner, p.solved, p.runs);
    }
    Ok(0)
}

fn render(args: RenderArgs) -> Outcome {
    let maps = load_maps(&args.maps)?;
    let mut paths: Vec<Vec<State>> = Vec::new();
    for file in &args.path {
        let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display())).map_err(data)?;
        let result: PlanResult =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", file.display())).map_err(data)?;
        paths.push(result.path);
    }
    let image = render_ppm(&maps, &paths, args.scale)?;
    fs::write(&args.out, image).with_context(|| format!("writing {}", args.out.display())).map_err(data)?;
    Ok(0)
}

fn run(cli: Cli) -> Outcome {
    let settings = Settings::load(cli.config.as_deref()).map_err(usage)?;
    let threads = cli.threads.or(settings.threads);
    if threads == Some(0) {
        return Err(usage(anyhow!("--threads must be at least 1")));
    }
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(usage)?;
    }
    let workers = threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    match cli.command {
        Command::Synth(args) => synth(args),
        Command::Validate { scene } => validate(&scene),
        Command::GenMaps(args) => gen_maps(args, &settings),
        Command::Plan(args) => run_plan(args, &settings),
        Command::Montecarlo { out } => montecarlo(&out, &settings, cli.config.is_some(), workers),
        Command::Render(args) => render(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Info,
        1 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    env_logger::Builder::new().filter_level(level).parse_env("UASMAP_LOG").init();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
