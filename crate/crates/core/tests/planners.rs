use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uasmap::cost::{transition_cost, State, WeightVector};
use uasmap::geometry::{Cell, GridLayer, GridSpec};
use uasmap::harness::{sample_instances, sample_weights};
use uasmap::maps::{build_map_set, DayNight, MapConfig, MetricMapSet};
use uasmap::planner::{
    astar, h_plus, octile_distance, plan, plan_ptp, validate_path, Algorithm, HeuristicKind, HeuristicTable,
    PlanProblem, PlanStatus, SpanMode,
};
use uasmap::world::{synth_scene, BoundingBox, SynthConfig};

fn grid(n: usize, res: f64, gps: &[f64]) -> MetricMapSet {
    let spec = GridSpec::new(BoundingBox::new(0.0, 0.0, n as f64 * res, n as f64 * res), res).unwrap();
    let zero = |name: &str| GridLayer::filled(name, spec, 20.0, 0.0);
    let gps = GridLayer::from_values("gps", spec, 20.0, gps.to_vec()).unwrap();
    MetricMapSet::from_layers(zero("obstacle"), gps, zero("lidar"), zero("population"), zero("risk"), DayNight::Day)
        .unwrap()
}

fn center(maps: &MetricMapSet, c: Cell) -> State {
    let [x, y] = maps.spec().cell_center(c);
    State::new(x, y, maps.altitude())
}

/// Cheapest path cost from `start` to `goal` over all simple 8-connected
/// paths, by depth-first enumeration with cost bounding.
fn enumerate_best(maps: &MetricMapSet, w: &WeightVector, start: Cell, goal: Cell) -> f64 {
    fn dfs(
        maps: &MetricMapSet,
        w: &WeightVector,
        at: Cell,
        goal: Cell,
        cost: f64,
        seen: &mut Vec<bool>,
        best: &mut f64,
    ) {
        if cost >= *best {
            return;
        }
        if at == goal {
            *best = cost;
            return;
        }
        let spec = maps.spec();
        for next in spec.neighbors8(at).collect::<Vec<_>>() {
            let i = spec.linear(next);
            if seen[i] {
                continue;
            }
            seen[i] = true;
            let c = transition_cost(&center(maps, at), &center(maps, next), maps, w).unwrap();
            dfs(maps, w, next, goal, cost + c, seen, best);
            seen[i] = false;
        }
    }
    let mut seen = vec![false; maps.spec().len()];
    seen[maps.spec().linear(start)] = true;
    let mut best = f64::INFINITY;
    dfs(maps, w, start, goal, 0.0, &mut seen, &mut best);
    best
}

#[test]
fn octile_examples_and_bounds() {
    assert!((octile_distance(Cell::new(0, 0), Cell::new(3, 2), 5.0) - 19.1421).abs() < 1e-4);
    assert!((octile_distance(Cell::new(0, 0), Cell::new(4, 4), 2.0) - 11.3137).abs() < 1e-4);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let a = Cell::new(rng.gen_range(0..50), rng.gen_range(0..50));
        let b = Cell::new(rng.gen_range(0..50), rng.gen_range(0..50));
        let (dx, dy) = (a.col.abs_diff(b.col) as f64, a.row.abs_diff(b.row) as f64);
        let o = octile_distance(a, b, 5.0);
        assert!(o >= 5.0 * dx.hypot(dy) - 1e-9);
        assert!(o <= 5.0 * (dx + dy) + 1e-9);
    }
}

#[test]
fn h_plus_below_exhaustive_optimum_on_4x4() {
    let gps = [0.9, 0.1, 0.7, 0.3, 0.2, 0.8, 0.05, 0.6, 0.4, 0.35, 0.9, 0.15, 0.0, 0.5, 0.25, 0.45];
    let maps = grid(4, 5.0, &gps);
    let w = WeightVector::new(0.1, 1.0, 0.0, 0.0, 0.0).unwrap();
    for goal in [Cell::new(3, 3), Cell::new(1, 2)] {
        let table = HeuristicTable::new(&maps, goal, w, HeuristicKind::Plus, SpanMode::FullSpan);
        for start in maps.spec().cells() {
            let best = enumerate_best(&maps, &w, start, goal);
            assert!(table.eval(start) <= best + 1e-12, "{start:?}: {} > {best}", table.eval(start));
        }
    }
}

#[test]
fn bounding_box_mode_can_overestimate() {
    // the straight row between start and goal is expensive; the row above is free
    #[rustfmt::skip]
    let gps = [
        0.0, 9.0, 9.0, 0.0,
        0.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 0.0,
    ];
    let maps = grid(4, 5.0, &gps);
    let w = WeightVector::new(0.0, 1.0, 0.0, 0.0, 0.0).unwrap();
    let (start, goal) = (Cell::new(0, 0), Cell::new(3, 0));
    let best = enumerate_best(&maps, &w, start, goal);
    assert_eq!(best, 0.0);
    assert_eq!(h_plus(start, goal, &maps, &w, SpanMode::Aabb), 18.0);
    assert_eq!(h_plus(start, goal, &maps, &w, SpanMode::FullSpan), 0.0);
}

#[test]
fn distance_weights_reduce_to_octile() {
    let maps = grid(6, 5.0, &[0.5; 36]);
    let goal = Cell::new(4, 1);
    let table = HeuristicTable::new(&maps, goal, WeightVector::distance_only(), HeuristicKind::Plus, SpanMode::Aabb);
    for c in maps.spec().cells() {
        assert_eq!(table.eval(c), octile_distance(c, goal, 5.0));
    }
    assert_eq!(table.eval(goal), 0.0);
}

#[test]
fn empty_grid_cost_is_octile() {
    let maps = grid(10, 5.0, &[0.0; 100]);
    let (s, g) = (Cell::new(1, 2), Cell::new(8, 6));
    let p =
        PlanProblem::new(&maps, maps.spec().cell_center(s), maps.spec().cell_center(g), WeightVector::distance_only());
    for kind in [HeuristicKind::Dist, HeuristicKind::Plus] {
        let r = astar(&p, kind).unwrap();
        assert!((r.total().unwrap() - octile_distance(s, g, 5.0)).abs() < 1e-9);
    }
}

fn dijkstra(maps: &MetricMapSet, w: &WeightVector, start: Cell, goal: Cell) -> Option<f64> {
    let spec = maps.spec();
    let mut dist = vec![f64::INFINITY; spec.len()];
    let mut heap = BinaryHeap::new();
    dist[spec.linear(start)] = 0.0;
    heap.push(Reverse((0u64, spec.linear(start))));
    while let Some(Reverse((bits, u))) = heap.pop() {
        let d = f64::from_bits(bits);
        if d > dist[u] {
            continue;
        }
        if u == spec.linear(goal) {
            return Some(d);
        }
        let cu = spec.cell_of(u);
        for cv in spec.neighbors8(cu).filter(|&c| maps.is_free(c)) {
            let nd = d + transition_cost(&center(maps, cu), &center(maps, cv), maps, w).unwrap();
            let v = spec.linear(cv);
            if nd < dist[v] {
                dist[v] = nd;
                // non-negative floats order like their bit patterns
                heap.push(Reverse((nd.to_bits(), v)));
            }
        }
    }
    None
}

#[test]
fn astar_variants_agree_on_random_scenes() {
    for seed in 0..30 {
        let scene = synth_scene(&SynthConfig {
            bbox: BoundingBox::new(0.0, 0.0, 100.0, 100.0),
            obstacle_count: 10,
            lot_size: 20.0,
            block_grid: (2, 2),
            seed: 200 + seed,
            ..SynthConfig::default()
        })
        .unwrap();
        let maps = build_map_set(&scene, 5.0, 20.0, DayNight::Night, &MapConfig::default()).unwrap();
        let w = sample_weights(seed);
        let (s, g) = sample_instances(&maps, 1, seed).unwrap()[0];
        let p = PlanProblem::new(&maps, s, g, w);
        let d = astar(&p, HeuristicKind::Dist).unwrap();
        let h = astar(&p, HeuristicKind::Plus).unwrap();
        let spec = maps.spec();
        let oracle =
            dijkstra(&maps, &w, spec.world_to_index(s[0], s[1]).unwrap(), spec.world_to_index(g[0], g[1]).unwrap());
        match oracle {
            Some(best) => {
                assert!((d.total().unwrap() - best).abs() < 1e-9);
                assert!((h.total().unwrap() - best).abs() < 1e-9);
            }
            None => assert!(d.status == PlanStatus::NoPath && h.status == PlanStatus::NoPath),
        }
    }
}

#[test]
fn ptp_same_point_is_zero_cost() {
    let maps = grid(4, 5.0, &[0.3; 16]);
    let p = PlanProblem::new(&maps, [7.0, 7.0], [7.0, 7.0], WeightVector::new(1.0, 1.0, 0.0, 0.0, 0.0).unwrap());
    let r = plan_ptp(&p).unwrap();
    assert_eq!(r.path.len(), 1);
    assert_eq!(r.total(), Some(0.0));
}

#[test]
fn all_planners_return_feasible_paths() {
    let scene = synth_scene(&SynthConfig { seed: 4, ..SynthConfig::default() }).unwrap();
    let maps = build_map_set(&scene, 5.0, 20.0, DayNight::Day, &MapConfig::default()).unwrap();
    let (s, g) = sample_instances(&maps, 3, 2).unwrap()[2];
    let p = PlanProblem::new(&maps, s, g, sample_weights(3));
    let ptp_direct = plan_ptp(&p).unwrap();
    for algo in Algorithm::ALL {
        let r = plan(&p, algo).unwrap();
        assert_eq!(r.algorithm, algo);
        if algo == Algorithm::Ptp {
            assert_eq!(r.without_timing(), ptp_direct.without_timing());
        } else {
            assert!(r.is_solved(), "{algo}");
        }
        if r.is_solved() {
            assert_eq!(validate_path(&r.path, &p).unwrap(), None, "{algo}");
        }
    }
    assert!("astar".parse::<Algorithm>().is_err());
    assert_eq!("bitstar_plus".parse::<Algorithm>().unwrap(), Algorithm::BitstarPlus);
}
