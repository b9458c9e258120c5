//! 8-connected grid Dijkstra.
//!
//! Path cost is tracked as an exact pair `(orthogonal steps, diagonal steps)`
//! and only turned into a float as `orth + diag * √2`, so the cost of a cell
//! path does not depend on the direction it is traversed in.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::SQRT_2;

use super::grid::{passable_neighbours, Cell, OccupancyGrid, Point2D};
use super::EnvError;

const UNSEEN: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Steps {
    orth: u32,
    diag: u32,
}

impl Steps {
    #[inline]
    fn cost(self) -> f64 {
        self.orth as f64 + self.diag as f64 * SQRT_2
    }
}

#[derive(PartialEq)]
struct Entry {
    cost: f64,
    index: usize,
    steps: Steps,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (cost, index)
        other.cost.total_cmp(&self.cost).then_with(|| other.index.cmp(&self.index))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Result of a (multi-source) Dijkstra expansion over a passability mask.
#[derive(Clone, Debug)]
pub struct DistanceField {
    resolution: f64,
    steps: Vec<Steps>,
    parent: Vec<u32>,
    origin: Vec<u32>,
}

impl DistanceField {
    /// Expands from every cell in `sources` (all must be passable).
    /// `max_cells` bounds the expansion radius in cell units.
    pub(crate) fn expand(
        width: usize,
        height: usize,
        resolution: f64,
        mask: &[bool],
        sources: &[usize],
        max_cells: Option<f64>,
    ) -> Self {
        let n = mask.len();
        let mut steps = vec![Steps { orth: UNSEEN, diag: UNSEEN }; n];
        let mut parent = vec![UNSEEN; n];
        let mut origin = vec![UNSEEN; n];
        let mut heap = BinaryHeap::new();
        for (k, &s) in sources.iter().enumerate() {
            if steps[s].orth == UNSEEN {
                steps[s] = Steps { orth: 0, diag: 0 };
                origin[s] = k as u32;
                heap.push(Entry { cost: 0.0, index: s, steps: steps[s] });
            }
        }
        let limit = max_cells.unwrap_or(f64::INFINITY);
        while let Some(Entry { index, steps: here, .. }) = heap.pop() {
            if steps[index] != here {
                continue;
            }
            for (next, diagonal) in passable_neighbours(width, height, mask, index) {
                let cand = if diagonal {
                    Steps { orth: here.orth, diag: here.diag + 1 }
                } else {
                    Steps { orth: here.orth + 1, diag: here.diag }
                };
                let cand_cost = cand.cost();
                if cand_cost > limit {
                    continue;
                }
                let current = steps[next];
                if current.orth == UNSEEN || cand_cost < current.cost() {
                    steps[next] = cand;
                    parent[next] = index as u32;
                    origin[next] = origin[index];
                    heap.push(Entry { cost: cand_cost, index: next, steps: cand });
                }
            }
        }
        Self { resolution, steps, parent, origin }
    }

    /// Single-source field over the FREE cells of `grid`.
    pub fn from_point(grid: &OccupancyGrid, p: Point2D) -> Result<Self, EnvError> {
        let source = free_index(grid, p)?;
        let mask = free_mask(grid);
        Ok(Self::expand(grid.width(), grid.height(), grid.resolution(), &mask, &[source], None))
    }

    /// Distance in meters from the source set to cell `index`.
    #[inline]
    pub fn meters_at(&self, index: usize) -> Option<f64> {
        let s = self.steps[index];
        (s.orth != UNSEEN).then(|| s.cost() * self.resolution)
    }

    /// Distance in meters to the cell containing `p`.
    pub fn distance_to(&self, grid: &OccupancyGrid, p: Point2D) -> Result<Option<f64>, EnvError> {
        let index = free_index(grid, p)?;
        Ok(self.meters_at(index))
    }

    /// Which source (position in the `sources` slice) reached `index` first.
    pub(crate) fn origin_of(&self, index: usize) -> Option<usize> {
        let o = self.origin[index];
        (o != UNSEEN).then_some(o as usize)
    }

    /// Cell path from the source that reached `index` back to `index`.
    pub(crate) fn path_to(&self, index: usize) -> Vec<usize> {
        let mut path = vec![index];
        let mut cur = index;
        while self.parent[cur] != UNSEEN {
            cur = self.parent[cur] as usize;
            path.push(cur);
        }
        path.reverse();
        path
    }
}

pub(crate) fn free_mask(grid: &OccupancyGrid) -> Vec<bool> {
    grid.cells().iter().map(|c| *c == Cell::Free).collect()
}

/// Index of the FREE cell containing `p`, or the matching error.
pub(crate) fn free_index(grid: &OccupancyGrid, p: Point2D) -> Result<usize, EnvError> {
    let (col, row) = grid.cell_of(p).ok_or(EnvError::OutOfBounds { x: p.x, y: p.y })?;
    if grid.cell(col, row) != Cell::Free {
        return Err(EnvError::OnObstacle { x: p.x, y: p.y });
    }
    Ok(grid.index(col, row))
}

/// Length in meters of the shortest 8-connected FREE-cell path between the
/// cells containing `a` and `b`; `Ok(None)` when they are not connected.
pub fn geodesic_distance(grid: &OccupancyGrid, a: Point2D, b: Point2D) -> Result<Option<f64>, EnvError> {
    let src = free_index(grid, a)?;
    let dst = free_index(grid, b)?;
    if src == dst {
        return Ok(Some(0.0));
    }
    let mask = free_mask(grid);
    let field = DistanceField::expand(grid.width(), grid.height(), grid.resolution(), &mask, &[src], None);
    Ok(field.meters_at(dst))
}

/// Reusable bounded Dijkstra for many small-radius queries on one mask.
pub(crate) struct LocalSearch {
    width: usize,
    height: usize,
    steps: Vec<Steps>,
    touched: Vec<usize>,
    heap: BinaryHeap<Entry>,
}

impl LocalSearch {
    pub(crate) fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            steps: vec![Steps { orth: UNSEEN, diag: UNSEEN }; width * height],
            touched: Vec::new(),
            heap: BinaryHeap::new(),
        }
    }

    /// Visits every cell whose distance from `source` is ≤ `radius_cells`,
    /// in nondecreasing distance order. Stops early once `visit` returns true
    /// and reports whether it did.
    pub(crate) fn any_within(
        &mut self,
        mask: &[bool],
        source: usize,
        radius_cells: f64,
        mut visit: impl FnMut(usize, f64) -> bool,
    ) -> bool {
        for i in self.touched.drain(..) {
            self.steps[i] = Steps { orth: UNSEEN, diag: UNSEEN };
        }
        self.heap.clear();
        let start = Steps { orth: 0, diag: 0 };
        self.steps[source] = start;
        self.touched.push(source);
        self.heap.push(Entry { cost: 0.0, index: source, steps: start });
        while let Some(Entry { cost, index, steps: here }) = self.heap.pop() {
            if self.steps[index] != here {
                continue;
            }
            if visit(index, cost) {
                return true;
            }
            for (next, diagonal) in passable_neighbours(self.width, self.height, mask, index) {
                let cand = if diagonal {
                    Steps { orth: here.orth, diag: here.diag + 1 }
                } else {
                    Steps { orth: here.orth + 1, diag: here.diag }
                };
                let c = cand.cost();
                if c > radius_cells {
                    continue;
                }
                let current = self.steps[next];
                if current.orth == UNSEEN {
                    self.touched.push(next);
                }
                if current.orth == UNSEEN || c < current.cost() {
                    self.steps[next] = cand;
                    self.heap.push(Entry { cost: c, index: next, steps: cand });
                }
            }
        }
        false
    }
}
