use super::grid::{Cell, GridSpec};
use crate::error::Result;

/// Cells visited by stepping from `a` to `b` in increments of one grid
/// resolution along the segment, with the final sample placed exactly at
/// `b`. Consecutive duplicates are collapsed; the first entry is `a`'s cell
/// and the last is `b`'s cell.
pub fn trace_segment(a: [f64; 2], b: [f64; 2], spec: &GridSpec) -> Result<Vec<Cell>> {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let length = dx.hypot(dy);
    let theta = dy.atan2(dx);
    let (cos, sin) = (theta.cos(), theta.sin());
    let steps = (length / spec.resolution).ceil() as usize;
    let mut cells: Vec<Cell> = Vec::with_capacity(steps + 1);
    for l in 0..=steps {
        let p = if l == steps {
            b
        } else {
            let s = l as f64 * spec.resolution;
            [a[0] + s * cos, a[1] + s * sin]
        };
        let cell = spec.world_to_index(p[0], p[1])?;
        if cells.last() != Some(&cell) {
            cells.push(cell);
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::BoundingBox;
    use proptest::prelude::*;

    fn spec() -> GridSpec {
        GridSpec::new(BoundingBox::new(0.0, 0.0, 100.0, 100.0), 5.0).unwrap()
    }

    #[test]
    fn degenerate_segment_is_one_cell() {
        assert_eq!(trace_segment([12.0, 13.0], [12.0, 13.0], &spec()).unwrap(), vec![Cell::new(2, 2)]);
    }

    #[test]
    fn axis_aligned_steps() {
        let cells = trace_segment([0.0, 0.0], [20.0, 0.0], &spec()).unwrap();
        let cols: Vec<usize> = cells.iter().map(|c| c.col).collect();
        assert_eq!(cols, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn diagonal_neighbor_step_skips_corner_cells() {
        let s = spec();
        let a = s.cell_center(Cell::new(3, 3));
        let b = s.cell_center(Cell::new(4, 4));
        assert_eq!(trace_segment(a, b, &s).unwrap(), vec![Cell::new(3, 3), Cell::new(4, 4)]);
    }

    #[test]
    fn leaving_the_grid_is_an_error() {
        assert!(trace_segment([0.0, 0.0], [100.0, 0.0], &spec()).is_err());
    }

    fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
        let d = [b[0] - a[0], b[1] - a[1]];
        let len2 = d[0] * d[0] + d[1] * d[1];
        let t = if len2 == 0.0 { 0.0 } else { (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0) };
        (p[0] - a[0] - t * d[0]).hypot(p[1] - a[1] - t * d[1])
    }

    proptest! {
        #[test]
        fn cells_hug_the_segment(ax in 0.0..99.99f64, ay in 0.0..99.99f64, bx in 0.0..99.99f64, by in 0.0..99.99f64) {
            let s = spec();
            let cells = trace_segment([ax, ay], [bx, by], &s).unwrap();
            prop_assert_eq!(cells[0], s.world_to_index(ax, ay).unwrap());
            prop_assert_eq!(*cells.last().unwrap(), s.world_to_index(bx, by).unwrap());
            for c in &cells {
                prop_assert!(point_segment_distance(s.cell_center(*c), [ax, ay], [bx, by]) <= s.resolution);
            }
            for w in cells.windows(2) {
                prop_assert!(w[0] != w[1]);
                // one step never skips a column or a row
                prop_assert!(w[0].col.abs_diff(w[1].col) <= 1 && w[0].row.abs_diff(w[1].row) <= 1);
            }
        }
    }
}
