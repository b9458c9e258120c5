use rand::Rng;

use super::clearance::ClearanceMap;
use super::geodesic::{free_mask, LocalSearch};
use super::grid::{OccupancyGrid, Point2D};
use super::EnvError;
use crate::seed::rng_from_seed;

/// Candidate draws per unit of `navigable_area / min_geo_sep²`.
pub const DRAWS_PER_SLOT: f64 = 50.0;

#[derive(Clone, Debug, PartialEq)]
pub struct SampleOutcome {
    pub points: Vec<Point2D>,
    /// Candidate draws spent; always equals `budget`.
    pub draws: usize,
    pub budget: usize,
}

impl SampleOutcome {
    /// No admissible point exists in the grid.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Dart throwing over navigable cell centers with geodesic-separation
/// rejection. Accepted points are pairwise more than `min_geo_sep` apart
/// along FREE cells; the draw budget is
/// `ceil(DRAWS_PER_SLOT × navigable_area / min_geo_sep²)`.
pub fn sample_navigable_points(map: &ClearanceMap<'_>, min_geo_sep: f64, seed: u64) -> Result<SampleOutcome, EnvError> {
    if !(min_geo_sep.is_finite() && min_geo_sep > 0.0) {
        return Err(EnvError::InvalidParameter(format!("min_geo_sep {min_geo_sep} must be > 0")));
    }
    let grid: &OccupancyGrid = map.grid();
    let candidates: Vec<usize> = (0..grid.len()).filter(|&i| map.is_navigable_cell(i)).collect();
    let budget = (DRAWS_PER_SLOT * grid.navigable_area() / (min_geo_sep * min_geo_sep)).ceil() as usize;
    if candidates.is_empty() {
        return Ok(SampleOutcome { points: Vec::new(), draws: 0, budget });
    }

    let mask = free_mask(grid);
    let res = grid.resolution();
    let radius_cells = min_geo_sep / res + 1e-9;
    let mut occupied = vec![false; grid.len()];
    let mut search = LocalSearch::new(grid.width(), grid.height());
    let mut rng = rng_from_seed(seed);
    let mut points = Vec::new();

    for _ in 0..budget {
        let cell = candidates[rng.gen_range(0..candidates.len())];
        if occupied[cell] {
            continue;
        }
        let conflict = search.any_within(&mask, cell, radius_cells, |i, cost| occupied[i] && cost * res <= min_geo_sep);
        if !conflict {
            occupied[cell] = true;
            points.push(grid.index_center(cell));
        }
    }
    Ok(SampleOutcome { points, draws: budget, budget })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envworld::geodesic_distance;

    #[test]
    fn half_meter_square_holds_one_point() {
        // 5x5 free cells at 0.1 m
        let g = OccupancyGrid::open_room("tiny", 7, 7, 0.1).unwrap();
        let map = ClearanceMap::new(&g, 0.2);
        let out = sample_navigable_points(&map, 0.4, 11).unwrap();
        assert_eq!(out.points.len(), 1);
    }

    #[test]
    fn empty_when_nothing_is_admissible() {
        let g = OccupancyGrid::open_room("slot", 6, 6, 0.1).unwrap();
        let map = ClearanceMap::new(&g, 0.2);
        let out = sample_navigable_points(&map, 0.4, 1).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn separation_holds_pairwise() {
        let g = OccupancyGrid::open_room("room", 32, 22, 0.1).unwrap();
        let map = ClearanceMap::new(&g, 0.2);
        let out = sample_navigable_points(&map, 0.4, 3).unwrap();
        assert!(out.points.len() > 10);
        for (i, a) in out.points.iter().enumerate() {
            for b in &out.points[i + 1..] {
                let d = geodesic_distance(&g, *a, *b).unwrap().unwrap();
                assert!(d > 0.4, "{a} {b} {d}");
            }
        }
        assert_eq!(out, sample_navigable_points(&map, 0.4, 3).unwrap());
    }

    #[test]
    fn rejects_nonpositive_separation() {
        let g = OccupancyGrid::open_room("room", 12, 12, 0.1).unwrap();
        let map = ClearanceMap::new(&g, 0.2);
        assert!(sample_navigable_points(&map, 0.0, 1).is_err());
    }
}
