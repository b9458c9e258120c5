use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::EnvError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cell {
    Free,
    Obstacle,
}

/// A position in the world frame, in meters.
///
/// The center of cell `(col, row)` sits at
/// `((col + 0.5) * resolution, (row + 0.5) * resolution)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn scaled(&self, k: f64) -> Point2D {
        Point2D::new(self.x * k, self.y * k)
    }
}

impl fmt::Display for Point2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.3}, {:.3})", self.x, self.y)
    }
}

/// A closed 2D free/obstacle raster standing in for the walkable floor of
/// one indoor scan.
#[derive(Clone, Debug, PartialEq)]
pub struct OccupancyGrid {
    scene_id: String,
    width: usize,
    height: usize,
    resolution: f64,
    cells: Vec<Cell>,
}

impl OccupancyGrid {
    /// Builds a grid, enforcing that every boundary cell is an obstacle.
    pub fn new(
        scene_id: impl Into<String>,
        width: usize,
        height: usize,
        resolution: f64,
        cells: Vec<Cell>,
    ) -> Result<Self, EnvError> {
        let scene_id = scene_id.into();
        validate_scene_id(&scene_id)?;
        if width < 2 || height < 2 {
            return Err(EnvError::InvalidGrid(format!("grid {width}x{height} is too small")));
        }
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(EnvError::InvalidGrid(format!("resolution {resolution} must be > 0")));
        }
        if cells.len() != width * height {
            return Err(EnvError::InvalidGrid(format!("expected {} cells, got {}", width * height, cells.len())));
        }
        let grid = Self { scene_id, width, height, resolution, cells };
        for col in 0..width {
            for row in [0, height - 1] {
                if grid.cell(col, row) == Cell::Free {
                    return Err(EnvError::OpenBoundary { col, row });
                }
            }
        }
        for row in 0..height {
            for col in [0, width - 1] {
                if grid.cell(col, row) == Cell::Free {
                    return Err(EnvError::OpenBoundary { col, row });
                }
            }
        }
        Ok(grid)
    }

    /// A grid whose interior is entirely free, surrounded by a one-cell wall.
    pub fn open_room(
        scene_id: impl Into<String>,
        width: usize,
        height: usize,
        resolution: f64,
    ) -> Result<Self, EnvError> {
        Self::from_fn(scene_id, width, height, resolution, |col, row| {
            if col == 0 || row == 0 || col + 1 == width || row + 1 == height {
                Cell::Obstacle
            } else {
                Cell::Free
            }
        })
    }

    pub fn from_fn(
        scene_id: impl Into<String>,
        width: usize,
        height: usize,
        resolution: f64,
        f: impl Fn(usize, usize) -> Cell,
    ) -> Result<Self, EnvError> {
        let mut cells = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                cells.push(f(col, row));
            }
        }
        Self::new(scene_id, width, height, resolution, cells)
    }

    pub fn scene_id(&self) -> &str {
        &self.scene_id
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    #[inline]
    pub fn index(&self, col: usize, row: usize) -> usize {
        row * self.width + col
    }

    #[inline]
    pub fn coords(&self, index: usize) -> (usize, usize) {
        (index % self.width, index / self.width)
    }

    #[inline]
    pub fn cell(&self, col: usize, row: usize) -> Cell {
        self.cells[self.index(col, row)]
    }

    #[inline]
    pub fn is_free_index(&self, index: usize) -> bool {
        self.cells[index] == Cell::Free
    }

    /// World-frame width and height in meters.
    pub fn extent(&self) -> (f64, f64) {
        (self.width as f64 * self.resolution, self.height as f64 * self.resolution)
    }

    pub fn cell_center(&self, col: usize, row: usize) -> Point2D {
        Point2D::new((col as f64 + 0.5) * self.resolution, (row as f64 + 0.5) * self.resolution)
    }

    pub fn index_center(&self, index: usize) -> Point2D {
        let (col, row) = self.coords(index);
        self.cell_center(col, row)
    }

    /// The cell containing `p`, or `None` when `p` lies outside the grid.
    pub fn cell_of(&self, p: Point2D) -> Option<(usize, usize)> {
        if !p.is_finite() {
            return None;
        }
        let col = (p.x / self.resolution).floor();
        let row = (p.y / self.resolution).floor();
        if col < 0.0 || row < 0.0 || col >= self.width as f64 || row >= self.height as f64 {
            return None;
        }
        Some((col as usize, row as usize))
    }

    pub fn contains(&self, p: Point2D) -> bool {
        self.cell_of(p).is_some()
    }

    pub fn is_free_point(&self, p: Point2D) -> bool {
        self.cell_of(p).is_some_and(|(c, r)| self.cell(c, r) == Cell::Free)
    }

    pub fn free_cell_count(&self) -> usize {
        self.cells.iter().filter(|c| **c == Cell::Free).count()
    }

    /// `#FREE × resolution²`, in square meters.
    pub fn navigable_area(&self) -> f64 {
        self.free_cell_count() as f64 * self.resolution * self.resolution
    }

    /// Number of 8-connected components of the FREE region (diagonal moves
    /// only when both orthogonal neighbours are free, matching the geodesic).
    pub fn free_component_count(&self) -> usize {
        let mask: Vec<bool> = self.cells.iter().map(|c| *c == Cell::Free).collect();
        component_count(self.width, self.height, &mask)
    }

    pub(crate) fn set(&mut self, col: usize, row: usize, cell: Cell) {
        let i = self.index(col, row);
        self.cells[i] = cell;
    }

    pub(crate) fn from_parts_unchecked(
        scene_id: String,
        width: usize,
        height: usize,
        resolution: f64,
        cells: Vec<Cell>,
    ) -> Self {
        Self { scene_id, width, height, resolution, cells }
    }
}

pub(crate) fn validate_scene_id(scene_id: &str) -> Result<(), EnvError> {
    if scene_id.is_empty() || scene_id.chars().any(|c| c.is_whitespace() || c.is_control()) {
        return Err(EnvError::InvalidGrid(format!("scene id {scene_id:?} must be non-empty without whitespace")));
    }
    Ok(())
}

/// The 8 neighbour offsets, orthogonal ones first.
pub(crate) const NEIGHBOURS: [(isize, isize); 8] =
    [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];

/// Iterates the passable 8-neighbours of `index`, refusing diagonal moves
/// that would cut an obstacle corner. Yields `(neighbour, is_diagonal)`.
#[inline]
pub(crate) fn passable_neighbours(
    width: usize,
    height: usize,
    mask: &[bool],
    index: usize,
) -> impl Iterator<Item = (usize, bool)> + '_ {
    let col = (index % width) as isize;
    let row = (index / width) as isize;
    NEIGHBOURS.iter().filter_map(move |&(dc, dr)| {
        let c = col + dc;
        let r = row + dr;
        if c < 0 || r < 0 || c >= width as isize || r >= height as isize {
            return None;
        }
        let n = r as usize * width + c as usize;
        if !mask[n] {
            return None;
        }
        let diagonal = dc != 0 && dr != 0;
        if diagonal {
            let side_a = row as usize * width + c as usize;
            let side_b = r as usize * width + col as usize;
            if !mask[side_a] || !mask[side_b] {
                return None;
            }
        }
        Some((n, diagonal))
    })
}

/// Labels the connected components of `mask`. Returns `(labels, count)`,
/// with `usize::MAX` for cells outside the mask.
pub(crate) fn label_components(width: usize, height: usize, mask: &[bool]) -> (Vec<usize>, usize) {
    let mut labels = vec![usize::MAX; mask.len()];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for start in 0..mask.len() {
        if !mask[start] || labels[start] != usize::MAX {
            continue;
        }
        labels[start] = count;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            for (n, _) in passable_neighbours(width, height, mask, i) {
                if labels[n] == usize::MAX {
                    labels[n] = count;
                    queue.push_back(n);
                }
            }
        }
        count += 1;
    }
    (labels, count)
}

pub(crate) fn component_count(width: usize, height: usize, mask: &[bool]) -> usize {
    label_components(width, height, mask).1
}
