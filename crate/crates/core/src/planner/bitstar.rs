//! Batch Informed Trees over the continuous plane.
//!
//! Edges are straight segments; the true edge cost traces the segment
//! through the grid, which doubles as the collision check. The heuristic
//! parts are `ĝ(x) = w0·|x − start|`, `ĉ(a, b) = w0·|a − b|` and
//! `ĥ(x) = w0·|x − goal|`, plus the layer lower bound of the cell holding
//! `x` for the plus variant.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Algorithm, Deadline, HeuristicKind, HeuristicTable, PlanProblem, PlanResult, PlanStatus};
use crate::cost::{entered_cells, weighted, State};
use crate::error::{Error, Result};
use crate::geometry::Cell;

/// Rejection-sampling attempts allowed per requested sample.
const ATTEMPTS_PER_SAMPLE: usize = 1000;
const DEADLINE_POLL: usize = 64;

const START: usize = 0;
const GOAL: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64);

impl Eq for Key {}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Sample,
    Tree,
    Pruned,
}

#[derive(Debug, Clone)]
struct Node {
    p: [f64; 2],
    role: Role,
    g: f64,
    parent: Option<usize>,
    children: Vec<usize>,
    /// In the tree before the current batch started.
    old: bool,
    ghat: f64,
    h: f64,
}

struct Search<'p, 'm> {
    problem: &'p PlanProblem<'m>,
    table: HeuristicTable,
    nodes: Vec<Node>,
    c_best: f64,
    vertex_queue: BinaryHeap<Reverse<(Key, usize)>>,
    edge_queue: BinaryHeap<Reverse<(Key, usize, usize)>>,
    queued: Vec<bool>,
    radius: f64,
    free_area: f64,
    expanded: usize,
}

impl<'p, 'm> Search<'p, 'm> {
    fn dist(&self, a: usize, b: usize) -> f64 {
        let (pa, pb) = (self.nodes[a].p, self.nodes[b].p);
        (pa[0] - pb[0]).hypot(pa[1] - pb[1])
    }

    fn c_hat(&self, a: usize, b: usize) -> f64 {
        self.problem.weights.distance * self.dist(a, b)
    }

    fn make_node(&self, p: [f64; 2], cell: Cell) -> Node {
        let w0 = self.problem.weights.distance;
        let (s, g) = (self.problem.start, self.problem.goal);
        Node {
            p,
            role: Role::Sample,
            g: f64::INFINITY,
            parent: None,
            children: Vec::new(),
            old: false,
            ghat: w0 * (p[0] - s[0]).hypot(p[1] - s[1]),
            h: w0 * (p[0] - g[0]).hypot(p[1] - g[1]) + self.table.layer_term(cell),
        }
    }

    fn f_hat(&self, v: usize) -> f64 {
        self.nodes[v].ghat + self.nodes[v].h
    }

    fn vertex_value(&self, v: usize) -> f64 {
        self.nodes[v].g + self.nodes[v].h
    }

    fn edge_value(&self, v: usize, x: usize) -> f64 {
        self.nodes[v].g + self.c_hat(v, x) + self.nodes[x].h
    }

    /// True segment cost, `None` when it crosses an obstacle.
    fn edge_cost(&self, a: usize, b: usize) -> Result<Option<f64>> {
        let maps = self.problem.maps;
        match entered_cells(self.nodes[a].p, self.nodes[b].p, maps) {
            Ok(cells) => {
                let mut layers = [0.0; 4];
                for c in cells {
                    for (acc, v) in layers.iter_mut().zip(maps.cell_costs(c)) {
                        *acc += v;
                    }
                }
                Ok(Some(weighted(&self.problem.weights, self.dist(a, b), &layers)))
            }
            Err(Error::InfeasibleTransition { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn sample(&mut self, rng: &mut ChaCha8Rng, count: usize) -> usize {
        let spec = *self.problem.maps.spec();
        let b = spec.bbox;
        let mut accepted = 0;
        let mut attempts = 0;
        while accepted < count && attempts < count * ATTEMPTS_PER_SAMPLE {
            attempts += 1;
            let p = [rng.gen_range(b.x_min..b.x_max), rng.gen_range(b.y_min..b.y_max)];
            let Ok(cell) = spec.world_to_index(p[0], p[1]) else { continue };
            if !self.problem.maps.is_free(cell) {
                continue;
            }
            let node = self.make_node(p, cell);
            if self.c_best.is_finite() && node.ghat + node.h >= self.c_best {
                continue;
            }
            self.nodes.push(node);
            accepted += 1;
        }
        accepted
    }

    fn incumbent_path(&self) -> Vec<usize> {
        let mut path = vec![GOAL];
        while let Some(p) = self.nodes[*path.last().unwrap()].parent {
            path.push(p);
        }
        path.reverse();
        path
    }

    /// Drops samples and vertices that cannot improve the incumbent.
    fn prune(&mut self) {
        let c_best = self.c_best;
        let mut keep: Vec<bool> =
            (0..self.nodes.len()).map(|v| self.nodes[v].role == Role::Tree && self.f_hat(v) <= c_best).collect();
        for v in self.incumbent_path() {
            keep[v] = true;
        }
        let mut reached = vec![false; self.nodes.len()];
        let mut stack = vec![START];
        reached[START] = true;
        while let Some(v) = stack.pop() {
            for &c in &self.nodes[v].children {
                if keep[c] && !reached[c] {
                    reached[c] = true;
                    stack.push(c);
                }
            }
        }
        for v in 0..self.nodes.len() {
            let f = self.f_hat(v);
            let node = &mut self.nodes[v];
            match node.role {
                Role::Pruned => {}
                Role::Sample => {
                    if f >= c_best {
                        node.role = Role::Pruned;
                    }
                }
                Role::Tree if reached[v] => node.children.retain(|&c| reached[c]),
                Role::Tree => {
                    node.role = if f < c_best { Role::Sample } else { Role::Pruned };
                    node.g = f64::INFINITY;
                    node.parent = None;
                    node.children.clear();
                }
            }
        }
    }

    fn set_radius(&mut self, eta: f64) {
        let q = self.nodes.iter().filter(|n| n.role != Role::Pruned).count() as f64;
        self.radius = if q > 1.0 { eta * (self.free_area * q.ln() / q).sqrt() } else { f64::INFINITY };
    }

    fn push_vertex(&mut self, v: usize) {
        self.queued[v] = true;
        self.vertex_queue.push(Reverse((Key(self.vertex_value(v)), v)));
    }

    /// Smallest current vertex value, discarding stale queue entries.
    fn best_vertex(&mut self) -> Option<f64> {
        while let Some(&Reverse((Key(k), v))) = self.vertex_queue.peek() {
            if !self.queued[v] || self.nodes[v].role != Role::Tree {
                self.vertex_queue.pop();
                continue;
            }
            let now = self.vertex_value(v);
            if now != k {
                self.vertex_queue.pop();
                self.vertex_queue.push(Reverse((Key(now), v)));
                continue;
            }
            return Some(k);
        }
        None
    }

    fn best_edge(&mut self) -> Option<f64> {
        while let Some(&Reverse((Key(k), v, x))) = self.edge_queue.peek() {
            let now = self.edge_value(v, x);
            if now != k {
                self.edge_queue.pop();
                self.edge_queue.push(Reverse((Key(now), v, x)));
                continue;
            }
            return Some(k);
        }
        None
    }

    fn expand(&mut self, v: usize) {
        self.queued[v] = false;
        self.expanded += 1;
        let c_best = self.c_best;
        let gv = self.nodes[v].g;
        let ghat_v = self.nodes[v].ghat;
        for x in 0..self.nodes.len() {
            if x == v || self.dist(v, x) > self.radius {
                continue;
            }
            let node = &self.nodes[x];
            let edge = match node.role {
                Role::Pruned => false,
                Role::Sample => ghat_v + self.c_hat(v, x) + node.h < c_best,
                Role::Tree => {
                    !self.nodes[v].old
                        && node.parent != Some(v)
                        && self.nodes[v].parent != Some(x)
                        && ghat_v + self.c_hat(v, x) + node.h < c_best
                        && gv + self.c_hat(v, x) < node.g
                }
            };
            if edge {
                self.edge_queue.push(Reverse((Key(self.edge_value(v, x)), v, x)));
            }
        }
    }

    /// Re-derives `g` below `v` after its cost changed.
    fn propagate(&mut self, v: usize) -> Result<()> {
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for i in 0..self.nodes[u].children.len() {
                let c = self.nodes[u].children[i];
                let cost = self.edge_cost(u, c)?.ok_or_else(|| Error::Geometry("tree edge became blocked".into()))?;
                self.nodes[c].g = self.nodes[u].g + cost;
                stack.push(c);
            }
        }
        Ok(())
    }

    /// Processes queued edges until the batch is exhausted. Returns false
    /// if the deadline passed first.
    fn run_batch(&mut self, clock: &Deadline) -> Result<bool> {
        let mut iterations = 0usize;
        loop {
            iterations += 1;
            if iterations.is_multiple_of(DEADLINE_POLL) && clock.expired() {
                return Ok(false);
            }
            while let Some(bv) = self.best_vertex() {
                match self.best_edge() {
                    Some(be) if be < bv => break,
                    _ => {
                        let Reverse((_, v)) = self.vertex_queue.pop().unwrap();
                        self.expand(v);
                    }
                }
            }
            if self.best_edge().is_none() {
                return Ok(true);
            }
            let Reverse((Key(key), v, x)) = self.edge_queue.pop().unwrap();
            if key >= self.c_best {
                self.edge_queue.clear();
                self.vertex_queue.clear();
                self.queued.fill(false);
                return Ok(true);
            }
            let gv = self.nodes[v].g;
            if gv + self.c_hat(v, x) >= self.nodes[x].g {
                continue;
            }
            let Some(cost) = self.edge_cost(v, x)? else { continue };
            if self.nodes[v].ghat + cost + self.nodes[x].h >= self.c_best || gv + cost >= self.nodes[x].g {
                continue;
            }
            match self.nodes[x].role {
                Role::Tree => {
                    let old_parent = self.nodes[x].parent.expect("non-root tree vertex has a parent");
                    self.nodes[old_parent].children.retain(|&c| c != x);
                }
                _ => {
                    self.nodes[x].role = Role::Tree;
                    self.nodes[x].old = false;
                    self.push_vertex(x);
                }
            }
            self.nodes[x].parent = Some(v);
            self.nodes[v].children.push(x);
            self.nodes[x].g = gv + cost;
            self.propagate(x)?;
            if self.nodes[GOAL].role == Role::Tree {
                self.c_best = self.nodes[GOAL].g;
            }
        }
    }
}

/// Anytime sampling-based planner. The incumbent is non-increasing across
/// batches; runs stop on the batch limit, the deadline, or a batch that
/// improves the incumbent by less than `eps_stop` relative.
pub fn bitstar(problem: &PlanProblem, kind: HeuristicKind) -> Result<PlanResult> {
    problem.validate()?;
    let algo = match kind {
        HeuristicKind::Dist => Algorithm::BitstarDist,
        HeuristicKind::Plus => Algorithm::BitstarPlus,
    };
    let clock = Deadline::new(problem.deadline);
    if !problem.endpoints_free()? {
        return Ok(PlanResult::empty(algo, PlanStatus::InfeasibleStartGoal));
    }
    if problem.start == problem.goal {
        let mut r = PlanResult::solved(algo, vec![problem.state(problem.start)], problem)?;
        r.elapsed_s = clock.elapsed_s();
        return Ok(r);
    }
    let maps = problem.maps;
    let params = problem.bitstar;
    let goal_cell = problem.goal_cell()?;
    let free_cells = maps.spec().cells().filter(|&c| maps.is_free(c)).count();
    let mut search = Search {
        problem,
        table: HeuristicTable::new(maps, goal_cell, problem.weights, kind, problem.span),
        nodes: Vec::new(),
        c_best: f64::INFINITY,
        vertex_queue: BinaryHeap::new(),
        edge_queue: BinaryHeap::new(),
        queued: Vec::new(),
        radius: f64::INFINITY,
        free_area: free_cells as f64 * maps.spec().resolution.powi(2),
        expanded: 0,
    };
    let mut root = search.make_node(problem.start, problem.start_cell()?);
    root.role = Role::Tree;
    root.g = 0.0;
    let goal = search.make_node(problem.goal, goal_cell);
    search.nodes.push(root);
    search.nodes.push(goal);

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut history = Vec::new();
    let mut samples_drawn = 0;
    let mut timed_out = false;
    for batch in 0..params.batches {
        if clock.expired() {
            timed_out = true;
            break;
        }
        if search.c_best.is_finite() {
            search.prune();
        }
        samples_drawn += search.sample(&mut rng, params.samples);
        search.set_radius(params.eta);
        search.queued = vec![false; search.nodes.len()];
        search.vertex_queue.clear();
        search.edge_queue.clear();
        for v in 0..search.nodes.len() {
            if search.nodes[v].role == Role::Tree {
                search.nodes[v].old = true;
                search.push_vertex(v);
            }
        }
        // the root has nothing to rewire but must connect to samples
        if batch == 0 {
            search.nodes[START].old = false;
        }
        let before = search.c_best;
        if !search.run_batch(&clock)? {
            timed_out = true;
            break;
        }
        let after = search.c_best;
        history.push(after.is_finite().then_some(after));
        log::debug!("{algo} batch {batch}: incumbent {after}, {} nodes", search.nodes.len());
        if before.is_finite() && (before - after) / before < params.eps_stop {
            break;
        }
    }

    let mut result = if search.nodes[GOAL].role == Role::Tree {
        let path: Vec<State> = search.incumbent_path().into_iter().map(|v| problem.state(search.nodes[v].p)).collect();
        PlanResult::solved(algo, path, problem)?
    } else if timed_out {
        PlanResult::empty(algo, PlanStatus::Timeout)
    } else {
        PlanResult::empty(algo, PlanStatus::NoPath)
    };
    result.expanded_nodes = search.expanded;
    result.samples_drawn = samples_drawn;
    result.batches_completed = history.len();
    result.incumbent_history = history;
    result.elapsed_s = clock.elapsed_s();
    Ok(result)
}
