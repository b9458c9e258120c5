//! Clearance geometry: which points an agent of a given radius may occupy,
//! and whether a straight segment keeps that radius away from obstacles.
//!
//! Obstacle cells are treated as closed squares. A point is clear when it
//! lies in a FREE cell and no obstacle square is strictly closer than the
//! clearance radius. A cell is *navigable* when every point of its square is
//! clear, so any segment lying inside navigable cells is traversable.

use super::grid::{Cell, OccupancyGrid, Point2D};

/// Slack on the clearance comparison so that points exactly on the clearance
/// boundary are classified the same way regardless of rounding.
const EPS: f64 = 1e-9;

fn window(grid: &OccupancyGrid, clearance: f64) -> isize {
    (clearance / grid.resolution()).ceil() as isize + 1
}

/// Distance from `p` to the square of cell `(col, row)`.
#[inline]
fn point_square_distance(grid: &OccupancyGrid, p: Point2D, col: isize, row: isize) -> f64 {
    let r = grid.resolution();
    let x0 = col as f64 * r;
    let y0 = row as f64 * r;
    let dx = (x0 - p.x).max(p.x - (x0 + r)).max(0.0);
    let dy = (y0 - p.y).max(p.y - (y0 + r)).max(0.0);
    dx.hypot(dy)
}

#[inline]
fn is_obstacle(grid: &OccupancyGrid, col: isize, row: isize) -> bool {
    col < 0
        || row < 0
        || col >= grid.width() as isize
        || row >= grid.height() as isize
        || grid.cell(col as usize, row as usize) == Cell::Obstacle
}

/// True when `p` is inside a FREE cell with no obstacle within `clearance`.
pub fn point_has_clearance(grid: &OccupancyGrid, p: Point2D, clearance: f64) -> bool {
    let Some((col, row)) = grid.cell_of(p) else {
        return false;
    };
    if grid.cell(col, row) == Cell::Obstacle {
        return false;
    }
    if clearance <= 0.0 {
        return true;
    }
    let w = window(grid, clearance);
    let (col, row) = (col as isize, row as isize);
    for r in row - w..=row + w {
        for c in col - w..=col + w {
            if is_obstacle(grid, c, r) && point_square_distance(grid, p, c, r) < clearance - EPS {
                return false;
            }
        }
    }
    true
}

fn samples(grid: &OccupancyGrid, a: Point2D, b: Point2D) -> impl Iterator<Item = Point2D> {
    let len = a.distance(&b);
    let n = ((len / (grid.resolution() / 2.0)).ceil() as usize).max(1);
    (0..=n).map(move |i| {
        let t = i as f64 / n as f64;
        Point2D::new(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t)
    })
}

/// True iff every point sampled along `a → b` at spacing ≤ resolution / 2
/// has clearance. Points outside the grid are never traversable.
pub fn line_traversable(grid: &OccupancyGrid, a: Point2D, b: Point2D, clearance: f64) -> bool {
    if !grid.contains(a) || !grid.contains(b) {
        return false;
    }
    samples(grid, a, b).all(|p| point_has_clearance(grid, p, clearance))
}

/// Precomputed clearance data for one grid and radius; answers the same
/// questions as the free functions, faster.
#[derive(Clone, Debug)]
pub struct ClearanceMap<'g> {
    grid: &'g OccupancyGrid,
    clearance: f64,
    navigable: Vec<bool>,
}

impl<'g> ClearanceMap<'g> {
    pub fn new(grid: &'g OccupancyGrid, clearance: f64) -> Self {
        let w = window(grid, clearance);
        let r = grid.resolution();
        let mut navigable = vec![false; grid.len()];
        for row in 0..grid.height() {
            for col in 0..grid.width() {
                if grid.cell(col, row) == Cell::Obstacle {
                    continue;
                }
                let (ci, ri) = (col as isize, row as isize);
                let mut clear = true;
                'scan: for rr in ri - w..=ri + w {
                    for cc in ci - w..=ci + w {
                        if !is_obstacle(grid, cc, rr) {
                            continue;
                        }
                        let gx = ((cc - ci).abs() - 1).max(0) as f64 * r;
                        let gy = ((rr - ri).abs() - 1).max(0) as f64 * r;
                        if gx.hypot(gy) < clearance || (cc == ci && rr == ri) {
                            clear = false;
                            break 'scan;
                        }
                    }
                }
                navigable[grid.index(col, row)] = clear;
            }
        }
        Self { grid, clearance, navigable }
    }

    pub fn grid(&self) -> &'g OccupancyGrid {
        self.grid
    }

    pub fn clearance(&self) -> f64 {
        self.clearance
    }

    /// Cells whose whole square keeps the clearance radius.
    pub fn navigable_mask(&self) -> &[bool] {
        &self.navigable
    }

    pub fn is_navigable_cell(&self, index: usize) -> bool {
        self.navigable[index]
    }

    pub fn navigable_cell_count(&self) -> usize {
        self.navigable.iter().filter(|b| **b).count()
    }

    pub fn point_clear(&self, p: Point2D) -> bool {
        match self.grid.cell_of(p) {
            Some((c, r)) if self.navigable[self.grid.index(c, r)] => true,
            Some(_) => point_has_clearance(self.grid, p, self.clearance),
            None => false,
        }
    }

    pub fn segment_clear(&self, a: Point2D, b: Point2D) -> bool {
        if !self.grid.contains(a) || !self.grid.contains(b) {
            return false;
        }
        samples(self.grid, a, b).all(|p| self.point_clear(p))
    }
}
