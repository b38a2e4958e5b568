use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uasmap::geometry::{Cell, GridLayer, GridSpec};
use uasmap::harness::sample_weights;
use uasmap::maps::{normalize_total, DayNight, MetricMapSet};
use uasmap::world::BoundingBox;

/// Density of the sum of three independent U[0, 1].
fn irwin_hall3(s: f64) -> f64 {
    match s {
        s if !(0.0..=3.0).contains(&s) => 0.0,
        s if s < 1.0 => s * s / 2.0,
        s if s < 2.0 => (-2.0 * s * s + 6.0 * s - 3.0) / 2.0,
        s => (3.0 - s).powi(2) / 2.0,
    }
}

/// First and second moments of `w0 = u/(u+v+s)` and `w1 = v/(u+v+s)` with
/// `u ~ U[0.1, 1]`, `v ~ U[0, 1]`, `s` the sum of three more, by midpoint
/// quadrature.
fn analytic_moments() -> [[f64; 2]; 2] {
    let (nu, nv, ns) = (90, 100, 300);
    let (du, dv, ds) = (0.9 / nu as f64, 1.0 / nv as f64, 3.0 / ns as f64);
    let mut m = [[0.0; 2]; 2];
    for i in 0..nu {
        let u = 0.1 + (i as f64 + 0.5) * du;
        for j in 0..nv {
            let v = (j as f64 + 0.5) * dv;
            for k in 0..ns {
                let s = (k as f64 + 0.5) * ds;
                let p = irwin_hall3(s) * du * dv * ds / 0.9;
                let t = u + v + s;
                let (w0, w1) = (u / t, v / t);
                m[0][0] += p * w0;
                m[0][1] += p * w0 * w0;
                m[1][0] += p * w1;
                m[1][1] += p * w1 * w1;
            }
        }
    }
    m
}

#[test]
fn weight_means_match_model() {
    let m = analytic_moments();
    let n = 1000;
    let samples: Vec<[f64; 5]> = (0..n).map(|s| sample_weights(s as u64).as_array()).collect();
    for k in 0..5 {
        let [mean, second] = m[(k > 0) as usize];
        let sd = (second - mean * mean).sqrt() / (n as f64).sqrt();
        let emp = samples.iter().map(|w| w[k]).sum::<f64>() / n as f64;
        assert!((emp - mean).abs() <= 3.0 * sd, "component {k}: {emp} vs {mean} ± {}", 3.0 * sd);
    }
}

#[test]
fn normalization_matches_two_pass_scan() {
    let spec = GridSpec::new(BoundingBox::new(0.0, 0.0, 160.0, 160.0), 5.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut layer = |name: &str| {
        GridLayer::from_values(name, spec, 20.0, (0..spec.len()).map(|_| rng.gen::<f64>()).collect()).unwrap()
    };
    let maps = MetricMapSet::from_layers(
        GridLayer::filled("obstacle", spec, 20.0, 0.0),
        layer("gps"),
        layer("lidar"),
        layer("population"),
        layer("risk"),
        DayNight::Day,
    )
    .unwrap();
    let total: Vec<f64> = spec.cells().map(|c| maps.cell_costs(c).iter().sum()).collect();
    let mut lo = f64::INFINITY;
    for &t in &total {
        if t < lo {
            lo = t;
        }
    }
    let mut hi = f64::NEG_INFINITY;
    for &t in &total {
        if t > hi {
            hi = t;
        }
    }
    let norm = normalize_total(&maps);
    for (i, c) in spec.cells().enumerate() {
        assert_eq!(norm.get(c), (total[i] - lo) / (hi - lo));
    }
    assert_eq!(norm.get(Cell::new(0, 0)).clamp(0.0, 1.0), norm.get(Cell::new(0, 0)));
}
