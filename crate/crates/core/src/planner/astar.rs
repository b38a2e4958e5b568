use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::f64::consts::SQRT_2;

use super::{Algorithm, Deadline, HeuristicKind, HeuristicTable, PlanProblem, PlanResult, PlanStatus};
use crate::cost::State;
use crate::error::Result;

const DEADLINE_POLL: usize = 1024;

/// Open-list key, ordered by `(f, h, cell index)`.
#[derive(Debug, Clone, Copy)]
struct Key {
    f: f64,
    h: f64,
    index: usize,
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.f.total_cmp(&other.f).then(self.h.total_cmp(&other.h)).then(self.index.cmp(&other.index))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Key {}

/// 8-connected A* over cell centers.
pub fn astar(problem: &PlanProblem, kind: HeuristicKind) -> Result<PlanResult> {
    problem.validate()?;
    let algo = match kind {
        HeuristicKind::Dist => Algorithm::AstarDist,
        HeuristicKind::Plus => Algorithm::AstarPlus,
    };
    let clock = Deadline::new(problem.deadline);
    if !problem.endpoints_free()? {
        return Ok(PlanResult::empty(algo, PlanStatus::InfeasibleStartGoal));
    }
    let maps = problem.maps;
    let spec = maps.spec();
    let w = problem.weights;
    let start = spec.linear(problem.start_cell()?);
    let goal_cell = problem.goal_cell()?;
    let goal = spec.linear(goal_cell);
    let table = HeuristicTable::new(maps, goal_cell, w, kind, problem.span);

    // per-cell weighted layer charge for entering it
    let enter: Vec<f64> = (0..spec.len())
        .map(|i| {
            let c = spec.cell_of(i);
            let costs = maps.cell_costs(c);
            w.layer_weights().iter().zip(&costs).fold(0.0, |acc, (wk, ck)| acc + wk * ck)
        })
        .collect();
    let step = [w.distance * spec.resolution, w.distance * spec.resolution * SQRT_2];

    let mut g = vec![f64::INFINITY; spec.len()];
    let mut parent = vec![usize::MAX; spec.len()];
    let mut closed = vec![false; spec.len()];
    let mut open = BinaryHeap::new();
    g[start] = 0.0;
    let h0 = table.eval(spec.cell_of(start));
    open.push(Reverse(Key { f: h0, h: h0, index: start }));
    let mut expanded = 0usize;

    let mut status = PlanStatus::NoPath;
    while let Some(Reverse(key)) = open.pop() {
        let u = key.index;
        if closed[u] {
            continue;
        }
        if u == goal {
            status = PlanStatus::Solved;
            break;
        }
        closed[u] = true;
        expanded += 1;
        if expanded.is_multiple_of(DEADLINE_POLL) && clock.expired() {
            status = PlanStatus::Timeout;
            break;
        }
        let cu = spec.cell_of(u);
        for cv in spec.neighbors8(cu) {
            let v = spec.linear(cv);
            if closed[v] || !maps.is_free(cv) {
                continue;
            }
            let diagonal = (cv.col != cu.col && cv.row != cu.row) as usize;
            let ng = g[u] + step[diagonal] + enter[v];
            if ng < g[v] {
                g[v] = ng;
                parent[v] = u;
                let h = table.eval(cv);
                open.push(Reverse(Key { f: ng + h, h, index: v }));
            }
        }
    }

    let mut result = if status == PlanStatus::Solved {
        let mut cells = vec![goal];
        while let Some(&last) = cells.last() {
            if last == start {
                break;
            }
            cells.push(parent[last]);
        }
        let path = cells
            .iter()
            .rev()
            .map(|&i| {
                let [x, y] = spec.cell_center(spec.cell_of(i));
                State::new(x, y, maps.altitude())
            })
            .collect();
        PlanResult::solved(algo, path, problem)?
    } else {
        PlanResult::empty(algo, status)
    };
    result.expanded_nodes = expanded;
    result.elapsed_s = clock.elapsed_s();
    Ok(result)
}
