//! Synthetic floorplans: a corridor running along the long axis, rooms on
//! either side separated by partition walls, one doorway per room onto the
//! corridor, occasional doorways between neighbouring rooms, and scattered
//! rectangular furniture. Not a reproduction of scanned geometry.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::clearance::ClearanceMap;
use super::grid::{component_count, validate_scene_id, Cell, OccupancyGrid};
use super::EnvError;
use crate::seed::{stage_rng, StageRng};

/// Generator attempts before giving up on a spec.
pub const MAX_ATTEMPTS: usize = 24;
/// Allowed relative deviation of the free area from [`FloorplanSpec::target_area`].
pub const AREA_TOLERANCE: f64 = 0.20;

const WALL_THICKNESS_M: f64 = 0.15;
const MIN_ROOM_DEPTH_M: f64 = 2.0;
const MIN_ROOM_SPAN_M: f64 = 2.2;
const INTER_ROOM_DOOR_PROB: f64 = 0.35;
const FURNITURE_SIDE_M: (f64, f64) = (0.3, 1.4);
const FURNITURE_ATTEMPTS: usize = 400;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloorplanSpec {
    pub scene_id: String,
    /// Outer bounds in meters, including the one-cell boundary wall.
    pub width_m: f64,
    pub height_m: f64,
    pub resolution: f64,
    pub min_rooms: usize,
    pub max_rooms: usize,
    pub min_corridor_width: f64,
    pub max_corridor_width: f64,
    /// Fraction of the interior covered by walls and furniture.
    pub obstacle_density: f64,
    /// Agent radius the layout must leave room for.
    pub clearance: f64,
    pub seed: u64,
}

impl Default for FloorplanSpec {
    fn default() -> Self {
        Self {
            scene_id: "scene".into(),
            width_m: 16.0,
            height_m: 10.0,
            resolution: 0.1,
            min_rooms: 4,
            max_rooms: 7,
            min_corridor_width: 1.2,
            max_corridor_width: 1.8,
            obstacle_density: 0.15,
            clearance: 0.2,
            seed: 0,
        }
    }
}

impl FloorplanSpec {
    fn cells(&self, meters: f64) -> usize {
        (meters / self.resolution).round() as usize
    }

    pub fn grid_size(&self) -> (usize, usize) {
        (self.cells(self.width_m), self.cells(self.height_m))
    }

    /// Interior area (bounds minus the boundary wall) in square meters.
    pub fn inner_area(&self) -> f64 {
        let (w, h) = self.grid_size();
        (w.saturating_sub(2) * h.saturating_sub(2)) as f64 * self.resolution * self.resolution
    }

    /// Free area the generator aims for: `inner_area × (1 − obstacle_density)`.
    pub fn target_area(&self) -> f64 {
        self.inner_area() * (1.0 - self.obstacle_density)
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        let bad = |m: String| Err(EnvError::InvalidSpec(m));
        validate_scene_id(&self.scene_id)?;
        if !(self.resolution.is_finite() && self.resolution > 0.0) {
            return bad(format!("resolution {} must be > 0", self.resolution));
        }
        if !(self.width_m.is_finite() && self.height_m.is_finite()) {
            return bad("bounds must be finite".into());
        }
        let (w, h) = self.grid_size();
        if w < 3 || h < 3 {
            return bad(format!("bounds {}x{} m leave no interior", self.width_m, self.height_m));
        }
        if self.min_rooms == 0 || self.min_rooms > self.max_rooms {
            return bad(format!("room range [{}, {}] is empty", self.min_rooms, self.max_rooms));
        }
        if !(self.clearance.is_finite() && self.clearance >= 0.0) {
            return bad(format!("clearance {} must be >= 0", self.clearance));
        }
        if !(self.min_corridor_width <= self.max_corridor_width) {
            return bad("corridor width range is empty".into());
        }
        if self.min_corridor_width < 2.0 * self.clearance {
            return bad(format!(
                "corridor width {} is narrower than twice the clearance {}",
                self.min_corridor_width, self.clearance
            ));
        }
        if !(0.0..0.9).contains(&self.obstacle_density) {
            return bad(format!("obstacle density {} must lie in [0, 0.9)", self.obstacle_density));
        }
        Ok(())
    }
}

/// Builds a closed grid whose FREE region and clearance-navigable region are
/// each a single connected component, with free area within
/// [`AREA_TOLERANCE`] of the spec's target. Deterministic per seed.
pub fn generate_floorplan(spec: &FloorplanSpec) -> Result<OccupancyGrid, EnvError> {
    spec.validate()?;
    let mut last_reason = String::new();
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = stage_rng(spec.seed, &format!("floorplan/{attempt}"));
        let grid = build(spec, &mut rng);
        match check(spec, &grid) {
            Ok(()) => return Ok(grid),
            Err(reason) => last_reason = reason,
        }
    }
    Err(EnvError::Unsatisfiable { retries: MAX_ATTEMPTS, reason: last_reason })
}

fn check(spec: &FloorplanSpec, grid: &OccupancyGrid) -> Result<(), String> {
    let area = grid.navigable_area();
    let target = spec.target_area();
    if area <= 0.0 {
        return Err("no free cells".into());
    }
    if (area - target).abs() > AREA_TOLERANCE * target {
        return Err(format!("free area {area:.2} m² outside ±20% of target {target:.2} m²"));
    }
    let free = grid.free_component_count();
    if free != 1 {
        return Err(format!("free region has {free} components"));
    }
    let map = ClearanceMap::new(grid, spec.clearance);
    let nav = component_count(grid.width(), grid.height(), map.navigable_mask());
    if nav != 1 {
        return Err(format!("navigable region has {nav} components"));
    }
    Ok(())
}

/// Layout canvas addressed along (long axis, short axis).
struct Canvas {
    cells: Vec<Cell>,
    width: usize,
    height: usize,
    transposed: bool,
}

impl Canvas {
    fn long(&self) -> usize {
        if self.transposed {
            self.height
        } else {
            self.width
        }
    }

    fn short(&self) -> usize {
        if self.transposed {
            self.width
        } else {
            self.height
        }
    }

    fn idx(&self, u: usize, v: usize) -> usize {
        if self.transposed {
            u * self.width + v
        } else {
            v * self.width + u
        }
    }

    fn set(&mut self, u: usize, v: usize, cell: Cell) {
        let i = self.idx(u, v);
        self.cells[i] = cell;
    }

    fn fill(&mut self, u: std::ops::Range<usize>, v: std::ops::Range<usize>, cell: Cell) {
        for uu in u {
            for vv in v.clone() {
                self.set(uu, vv, cell);
            }
        }
    }
}

fn build(spec: &FloorplanSpec, rng: &mut StageRng) -> OccupancyGrid {
    let (width, height) = spec.grid_size();
    let mut canvas = Canvas { cells: vec![Cell::Free; width * height], width, height, transposed: height > width };
    let (long, short) = (canvas.long(), canvas.short());
    // boundary
    canvas.fill(0..long, 0..1, Cell::Obstacle);
    canvas.fill(0..long, short - 1..short, Cell::Obstacle);
    canvas.fill(0..1, 0..short, Cell::Obstacle);
    canvas.fill(long - 1..long, 0..short, Cell::Obstacle);

    let mut protected = vec![false; width * height];
    if spec.obstacle_density > 0.0 {
        lay_out_rooms(spec, &mut canvas, &mut protected, rng);
        let grid =
            OccupancyGrid::from_parts_unchecked(spec.scene_id.clone(), width, height, spec.resolution, canvas.cells);
        return place_furniture(spec, grid, &protected, rng);
    }
    OccupancyGrid::from_parts_unchecked(spec.scene_id.clone(), width, height, spec.resolution, canvas.cells)
}

fn uniform_cells(spec: &FloorplanSpec, rng: &mut StageRng, lo: f64, hi: f64) -> usize {
    let m = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
    spec.cells(m).max(1)
}

fn lay_out_rooms(spec: &FloorplanSpec, canvas: &mut Canvas, protected: &mut [bool], rng: &mut StageRng) {
    let (long, short) = (canvas.long(), canvas.short());
    let wall = spec.cells(WALL_THICKNESS_M).max(1);
    let min_depth = spec.cells(MIN_ROOM_DEPTH_M);
    let min_span = spec.cells(MIN_ROOM_SPAN_M);
    let interior = short - 2;

    let corridor = uniform_cells(spec, rng, spec.min_corridor_width, spec.max_corridor_width).min(interior);
    let center = 1 + (rng.gen_range(0.35..=0.65) * interior as f64).round() as usize;
    let v0 = center.saturating_sub(corridor / 2).clamp(1, short - 1 - corridor);
    let v1 = v0 + corridor;
    for u in 1..long - 1 {
        for v in v0..v1 {
            protected[canvas.idx(u, v)] = true;
        }
    }

    // (side depth range, wall band) for the two sides of the corridor
    let mut sides = Vec::new();
    if v0 >= 1 + wall + min_depth {
        sides.push((1..v0 - wall, v0 - wall..v0));
    }
    if v1 + wall + min_depth < short {
        sides.push((v1 + wall..short - 1, v1..v1 + wall));
    }
    if sides.is_empty() {
        return;
    }

    let total_rooms = rng.gen_range(spec.min_rooms..=spec.max_rooms);
    let max_per_side = ((long - 2) / min_span.max(1)).max(1);
    let mut per_side = vec![total_rooms / sides.len(); sides.len()];
    for extra in per_side.iter_mut().take(total_rooms % sides.len()) {
        *extra += 1;
    }

    for ((depth, band), rooms) in sides.into_iter().zip(per_side) {
        let rooms = rooms.clamp(1, max_per_side);
        canvas.fill(1..long - 1, band.clone(), Cell::Obstacle);

        let span = (long - 2) as f64 / rooms as f64;
        let mut cuts = Vec::with_capacity(rooms + 1);
        cuts.push(1usize);
        for i in 1..rooms {
            let jitter = rng.gen_range(-0.2..=0.2) * span;
            let cut = (1.0 + i as f64 * span + jitter).round() as usize;
            cuts.push(cut);
        }
        cuts.push(long - 1);

        for w in cuts.windows(2).skip(1) {
            // partition wall at the start of each room after the first
            let at = w[0];
            canvas.fill(at..(at + wall).min(long - 1), depth.clone(), Cell::Obstacle);
        }

        for (k, w) in cuts.windows(2).enumerate() {
            let start = if k == 0 { w[0] } else { w[0] + wall };
            let end = w[1];
            if end <= start + 2 {
                continue;
            }
            let room_len = end - start;
            let door = uniform_cells(spec, rng, spec.min_corridor_width, spec.max_corridor_width).min(room_len - 2);
            let offset = rng.gen_range(start + 1..=end - 1 - door);
            canvas.fill(offset..offset + door, band.clone(), Cell::Free);
            for u in offset..offset + door {
                for v in band.clone() {
                    protected[canvas.idx(u, v)] = true;
                }
            }
            if k > 0 && rng.gen_bool(INTER_ROOM_DOOR_PROB) {
                let d = depth.end - depth.start;
                let door =
                    uniform_cells(spec, rng, spec.min_corridor_width, spec.max_corridor_width).min(d.saturating_sub(2));
                if door > 0 {
                    let v = rng.gen_range(depth.start + 1..=depth.end - 1 - door);
                    let at = w[0];
                    canvas.fill(at..(at + wall).min(long - 1), v..v + door, Cell::Free);
                    for u in at..(at + wall).min(long - 1) {
                        for vv in v..v + door {
                            protected[canvas.idx(u, vv)] = true;
                        }
                    }
                }
            }
        }
    }
}

fn place_furniture(
    spec: &FloorplanSpec,
    mut grid: OccupancyGrid,
    protected: &[bool],
    rng: &mut StageRng,
) -> OccupancyGrid {
    let (width, height) = (grid.width(), grid.height());
    let interior = ((width - 2) * (height - 2)) as f64;
    let budget = (spec.obstacle_density * interior).round() as usize;
    let obstacles = |g: &OccupancyGrid| (g.len() - g.free_cell_count()) - (2 * width + 2 * height - 4);
    // keep a margin around doorways and the corridor so furniture never plugs them
    let margin = spec.cells(spec.clearance) + 1;

    for _ in 0..FURNITURE_ATTEMPTS {
        let placed = obstacles(&grid);
        if placed >= budget {
            break;
        }
        let w = uniform_cells(spec, rng, FURNITURE_SIDE_M.0, FURNITURE_SIDE_M.1);
        let h = uniform_cells(spec, rng, FURNITURE_SIDE_M.0, FURNITURE_SIDE_M.1);
        if w + 2 >= width || h + 2 >= height {
            continue;
        }
        let c0 = rng.gen_range(1..width - 1 - w);
        let r0 = rng.gen_range(1..height - 1 - h);
        let mut ok = true;
        'probe: for r in r0.saturating_sub(margin)..(r0 + h + margin).min(height) {
            for c in c0.saturating_sub(margin)..(c0 + w + margin).min(width) {
                let inside = (c0..c0 + w).contains(&c) && (r0..r0 + h).contains(&r);
                let i = grid.index(c, r);
                if protected[i] || (inside && !grid.is_free_index(i)) {
                    ok = false;
                    break 'probe;
                }
            }
        }
        if !ok {
            continue;
        }
        let mut trial = grid.clone();
        for r in r0..r0 + h {
            for c in c0..c0 + w {
                trial.set(c, r, Cell::Obstacle);
            }
        }
        if trial.free_component_count() != 1 {
            continue;
        }
        let map = ClearanceMap::new(&trial, spec.clearance);
        if component_count(width, height, map.navigable_mask()) != 1 {
            continue;
        }
        grid = trial;
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(seed: u64) -> FloorplanSpec {
        FloorplanSpec { scene_id: format!("s{seed}"), seed, ..FloorplanSpec::default() }
    }

    #[test]
    fn same_seed_same_grid() {
        let a = generate_floorplan(&spec(1)).unwrap();
        let b = generate_floorplan(&spec(1)).unwrap();
        assert_eq!(a, b);
        let c = generate_floorplan(&spec(2)).unwrap();
        assert_ne!(a.cells(), c.cells());
    }

    #[test]
    fn zero_density_is_an_empty_rectangle() {
        let s = FloorplanSpec { obstacle_density: 0.0, ..spec(3) };
        let g = generate_floorplan(&s).unwrap();
        assert!((g.navigable_area() - s.inner_area()).abs() < 1e-9);
        assert_eq!(g.free_component_count(), 1);
    }

    #[test]
    fn area_lands_near_target() {
        for seed in 1..6 {
            let s = spec(seed);
            let g = generate_floorplan(&s).unwrap();
            let rel = (g.navigable_area() - s.target_area()).abs() / s.target_area();
            assert!(rel <= AREA_TOLERANCE, "seed {seed}: {rel}");
        }
    }

    #[test]
    fn rejects_invalid_specs() {
        let narrow = FloorplanSpec { min_corridor_width: 0.3, ..spec(1) };
        assert!(matches!(generate_floorplan(&narrow), Err(EnvError::InvalidSpec(_))));
        let rooms = FloorplanSpec { min_rooms: 5, max_rooms: 2, ..spec(1) };
        assert!(generate_floorplan(&rooms).is_err());
        let dense = FloorplanSpec { obstacle_density: 0.95, ..spec(1) };
        assert!(generate_floorplan(&dense).is_err());
    }

    #[test]
    fn unsatisfiable_reports_retry_count() {
        // a corridor wider than the whole scene cannot leave a navigable strip
        let s =
            FloorplanSpec { width_m: 1.0, height_m: 0.6, min_corridor_width: 0.4, max_corridor_width: 0.4, ..spec(1) };
        match generate_floorplan(&s) {
            Err(EnvError::Unsatisfiable { retries, .. }) => assert_eq!(retries, MAX_ATTEMPTS),
            other => panic!("expected Unsatisfiable, got {other:?}"),
        }
    }
}
