//! Distance and layer-aware heuristics.
//!
//! Any 8-connected path from a cell to the goal enters every column strictly
//! between them (and the goal's column) at least once, and likewise every
//! row. Summing a per-column lower bound of a layer over those columns gives
//! a lower bound on the layer cost the path will pay, and the same for rows;
//! the larger of the two is used. The per-column bound is the column minimum
//! taken either over the rows of the start/goal bounding box or over the
//! whole column.

use serde::{Deserialize, Serialize};

use crate::cost::WeightVector;
use crate::geometry::Cell;
use crate::maps::MetricMapSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeuristicKind {
    /// Weighted distance only.
    Dist,
    /// Weighted distance plus the layer lower bound.
    Plus,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpanMode {
    /// Column (row) minima over the node/goal bounding box only. Tighter,
    /// but a path that leaves the box can undercut it.
    Aabb,
    /// Minima over the full column (row). Admissible and consistent.
    #[default]
    FullSpan,
}

/// Octile distance between cell centers in meters.
pub fn octile_distance(a: Cell, b: Cell, resolution: f64) -> f64 {
    let dx = a.col.abs_diff(b.col) as f64;
    let dy = a.row.abs_diff(b.row) as f64;
    resolution * ((dx - dy).abs() + std::f64::consts::SQRT_2 * dx.min(dy))
}

fn between(from: usize, to: usize) -> Vec<usize> {
    if from < to {
        (from + 1..=to).collect()
    } else {
        (to..from).rev().collect()
    }
}

/// Layer part of the plus heuristic, evaluated directly:
/// `Σ_k w_k · max(column bound, row bound)`.
pub fn h_plus(node: Cell, goal: Cell, maps: &MetricMapSet, w: &WeightVector, mode: SpanMode) -> f64 {
    let spec = maps.spec();
    let (rows, cols) = match mode {
        SpanMode::Aabb => {
            (node.row.min(goal.row)..=node.row.max(goal.row), node.col.min(goal.col)..=node.col.max(goal.col))
        }
        SpanMode::FullSpan => (0..=spec.n_rows - 1, 0..=spec.n_cols - 1),
    };
    let mut total = 0.0;
    for (wk, layer) in w.layer_weights().iter().zip(maps.cost_layers()) {
        let col_sum: f64 = between(node.col, goal.col)
            .into_iter()
            .map(|c| rows.clone().map(|r| layer.get(Cell::new(c, r))).fold(f64::INFINITY, f64::min))
            .sum();
        let row_sum: f64 = between(node.row, goal.row)
            .into_iter()
            .map(|r| cols.clone().map(|c| layer.get(Cell::new(c, r))).fold(f64::INFINITY, f64::min))
            .sum();
        total += wk * col_sum.max(row_sum);
    }
    total
}

/// Per-goal precomputation of [`h_plus`] with O(1) lookups.
#[derive(Debug, Clone)]
pub struct HeuristicTable {
    kind: HeuristicKind,
    mode: SpanMode,
    goal: Cell,
    n_cols: usize,
    n_rows: usize,
    resolution: f64,
    weights: WeightVector,
    // prefix sums of column minima; in Aabb mode one prefix per node row
    col_prefix: Vec<Vec<f64>>,
    row_prefix: Vec<Vec<f64>>,
}

impl HeuristicTable {
    pub fn new(maps: &MetricMapSet, goal: Cell, weights: WeightVector, kind: HeuristicKind, mode: SpanMode) -> Self {
        let spec = maps.spec();
        let (n_cols, n_rows) = (spec.n_cols, spec.n_rows);
        let mut table = Self {
            kind,
            mode,
            goal,
            n_cols,
            n_rows,
            resolution: spec.resolution,
            weights,
            col_prefix: Vec::new(),
            row_prefix: Vec::new(),
        };
        if kind == HeuristicKind::Dist {
            return table;
        }
        for layer in maps.cost_layers() {
            let v = |c: usize, r: usize| layer.values[r * n_cols + c];
            match mode {
                SpanMode::FullSpan => {
                    let col_min: Vec<f64> =
                        (0..n_cols).map(|c| (0..n_rows).map(|r| v(c, r)).fold(f64::INFINITY, f64::min)).collect();
                    let row_min: Vec<f64> =
                        (0..n_rows).map(|r| (0..n_cols).map(|c| v(c, r)).fold(f64::INFINITY, f64::min)).collect();
                    table.col_prefix.push(prefix(&col_min));
                    table.row_prefix.push(prefix(&row_min));
                }
                SpanMode::Aabb => {
                    // anchored[r][c]: min of column c over rows between r and goal.row
                    let mut anchored = vec![0.0; n_rows * n_cols];
                    for c in 0..n_cols {
                        anchor_scan(goal.row, n_rows, |r| v(c, r), |r, m| anchored[r * n_cols + c] = m);
                    }
                    let mut per_row = Vec::with_capacity(n_rows * (n_cols + 1));
                    for r in 0..n_rows {
                        per_row.extend(prefix(&anchored[r * n_cols..(r + 1) * n_cols]));
                    }
                    let mut anchored = vec![0.0; n_cols * n_rows];
                    for r in 0..n_rows {
                        anchor_scan(goal.col, n_cols, |c| v(c, r), |c, m| anchored[c * n_rows + r] = m);
                    }
                    let mut per_col = Vec::with_capacity(n_cols * (n_rows + 1));
                    for c in 0..n_cols {
                        per_col.extend(prefix(&anchored[c * n_rows..(c + 1) * n_rows]));
                    }
                    table.col_prefix.push(per_row);
                    table.row_prefix.push(per_col);
                }
            }
        }
        table
    }

    pub fn goal(&self) -> Cell {
        self.goal
    }

    /// Weighted layer lower bound from `cell`; zero for the distance kind.
    pub fn layer_term(&self, cell: Cell) -> f64 {
        if self.kind == HeuristicKind::Dist {
            return 0.0;
        }
        let (col_off, row_off) = match self.mode {
            SpanMode::FullSpan => (0, 0),
            SpanMode::Aabb => (cell.row * (self.n_cols + 1), cell.col * (self.n_rows + 1)),
        };
        let mut total = 0.0;
        for (k, wk) in self.weights.layer_weights().iter().enumerate() {
            let col_sum = range_sum(&self.col_prefix[k][col_off..], cell.col, self.goal.col);
            let row_sum = range_sum(&self.row_prefix[k][row_off..], cell.row, self.goal.row);
            total += wk * col_sum.max(row_sum);
        }
        total
    }

    /// Grid heuristic: `w0 · octile + layer term`.
    pub fn eval(&self, cell: Cell) -> f64 {
        self.weights.distance * octile_distance(cell, self.goal, self.resolution) + self.layer_term(cell)
    }
}

fn prefix(values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len() + 1);
    out.push(0.0);
    let mut acc = 0.0;
    for v in values {
        acc += v;
        out.push(acc);
    }
    out
}

/// Running minimum outward from `anchor` in both directions.
fn anchor_scan(anchor: usize, n: usize, value: impl Fn(usize) -> f64, mut store: impl FnMut(usize, f64)) {
    let mut m = f64::INFINITY;
    for i in anchor..n {
        m = m.min(value(i));
        store(i, m);
    }
    m = f64::INFINITY;
    for i in (0..=anchor).rev() {
        m = m.min(value(i));
        store(i, m);
    }
}

/// Sum of entries strictly after `from` up to `to` inclusive, in either
/// direction, from a prefix array.
fn range_sum(prefix: &[f64], from: usize, to: usize) -> f64 {
    match from.cmp(&to) {
        std::cmp::Ordering::Less => prefix[to + 1] - prefix[from + 1],
        std::cmp::Ordering::Greater => prefix[from] - prefix[to],
        std::cmp::Ordering::Equal => 0.0,
    }
}
