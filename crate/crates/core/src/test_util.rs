use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{GridLayer, GridSpec};
use crate::maps::{DayNight, MetricMapSet};
use crate::world::BoundingBox;

/// n×n map set with uniform random cost layers at 20 m altitude.
pub(crate) fn random_maps(seed: u64, n: usize, res: f64, obstacle_p: f64) -> MetricMapSet {
    let spec = GridSpec::new(BoundingBox::new(0.0, 0.0, n as f64 * res, n as f64 * res), res).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layer = |name: &str, rng: &mut ChaCha8Rng| {
        GridLayer::from_values(name, spec, 20.0, (0..spec.len()).map(|_| rng.gen_range(0.0..1.0)).collect()).unwrap()
    };
    let gps = layer("gps", &mut rng);
    let lidar = layer("lidar", &mut rng);
    let pop = layer("population", &mut rng);
    let risk = layer("risk", &mut rng);
    let obs = GridLayer::from_values(
        "obstacle",
        spec,
        20.0,
        (0..spec.len()).map(|_| if rng.gen_bool(obstacle_p) { 1.0 } else { 0.0 }).collect(),
    )
    .unwrap();
    MetricMapSet::from_layers(obs, gps, lidar, pop, risk, DayNight::Day).unwrap()
}
