use std::collections::VecDeque;
use std::f64::consts::SQRT_2;
use std::sync::OnceLock;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vlngen_core::envworld::{
    generate_floorplan, geodesic_distance, line_traversable, point_has_clearance, sample_navigable_points, to_raster,
    ClearanceMap, FloorplanSpec, DEFAULT_CLEARANCE,
};
use vlngen_core::{Cell, OccupancyGrid, Point2D};

fn plan(seed: u64) -> OccupancyGrid {
    let spec =
        FloorplanSpec { scene_id: format!("plan{seed}"), seed, width_m: 12.0, height_m: 10.0, ..Default::default() };
    generate_floorplan(&spec).expect("plan generates")
}

fn seven() -> &'static OccupancyGrid {
    static PLAN: OnceLock<OccupancyGrid> = OnceLock::new();
    PLAN.get_or_init(|| plan(7))
}

fn navigable_centers(grid: &OccupancyGrid) -> Vec<Point2D> {
    let map = ClearanceMap::new(grid, DEFAULT_CLEARANCE);
    (0..grid.len()).filter(|&i| map.is_navigable_cell(i)).map(|i| grid.index_center(i)).collect()
}

/// 4-connected flood fill over FREE cells.
fn flood_fill_components(grid: &OccupancyGrid) -> usize {
    let (w, h) = (grid.width(), grid.height());
    let mut seen = vec![false; w * h];
    let mut count = 0;
    for start in 0..w * h {
        if seen[start] || grid.cells()[start] != Cell::Free {
            continue;
        }
        count += 1;
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let (c, r) = (i % w, i / w);
            let mut push = |c: usize, r: usize| {
                let j = r * w + c;
                if !seen[j] && grid.cells()[j] == Cell::Free {
                    seen[j] = true;
                    queue.push_back(j);
                }
            };
            if c > 0 {
                push(c - 1, r);
            }
            if c + 1 < w {
                push(c + 1, r);
            }
            if r > 0 {
                push(c, r - 1);
            }
            if r + 1 < h {
                push(c, r + 1);
            }
        }
    }
    count
}

/// Relaxes every FREE cell against its 8 neighbours until nothing changes.
/// Diagonal moves need both side cells FREE.
fn relaxation_distances(grid: &OccupancyGrid, source: (usize, usize)) -> Vec<f64> {
    let (w, h) = (grid.width() as isize, grid.height() as isize);
    let free =
        |c: isize, r: isize| c >= 0 && r >= 0 && c < w && r < h && grid.cell(c as usize, r as usize) == Cell::Free;
    let mut dist = vec![f64::INFINITY; grid.len()];
    dist[grid.index(source.0, source.1)] = 0.0;
    loop {
        let mut changed = false;
        for r in 0..h {
            for c in 0..w {
                if !free(c, r) {
                    continue;
                }
                let here = dist[(r * w + c) as usize];
                for dr in -1..=1isize {
                    for dc in -1..=1isize {
                        if (dc, dr) == (0, 0) || !free(c + dc, r + dr) {
                            continue;
                        }
                        let diagonal = dc != 0 && dr != 0;
                        if diagonal && !(free(c + dc, r) && free(c, r + dr)) {
                            continue;
                        }
                        let there = dist[((r + dr) * w + c + dc) as usize];
                        let cand = there + if diagonal { SQRT_2 } else { 1.0 };
                        if cand < here - 1e-12 {
                            dist[(r * w + c) as usize] = cand;
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    dist.iter().map(|d| d * grid.resolution()).collect()
}

/// Clearance checked against every obstacle square in the grid.
fn clear_by_full_scan(grid: &OccupancyGrid, p: Point2D, clearance: f64) -> bool {
    let r = grid.resolution();
    let Some((pc, pr)) = grid.cell_of(p) else { return false };
    if grid.cell(pc, pr) == Cell::Obstacle {
        return false;
    }
    for row in 0..grid.height() {
        for col in 0..grid.width() {
            if grid.cell(col, row) != Cell::Obstacle {
                continue;
            }
            let (x0, y0) = (col as f64 * r, row as f64 * r);
            let dx = (x0 - p.x).max(p.x - x0 - r).max(0.0);
            let dy = (y0 - p.y).max(p.y - y0 - r).max(0.0);
            if dx.hypot(dy) < clearance - 1e-9 {
                return false;
            }
        }
    }
    true
}

#[test]
fn seven_has_one_free_component_by_flood_fill() {
    let g = seven();
    assert_eq!(flood_fill_components(g), 1);
    assert_eq!(g.free_component_count(), 1);
}

#[test]
fn navigable_area_equals_raster_count() {
    let g = seven();
    let dots = to_raster(g).lines().skip(5).flat_map(str::chars).filter(|&c| c == '.').count();
    let expected = dots as f64 * g.resolution() * g.resolution();
    assert_eq!(g.navigable_area(), expected);
}

#[test]
fn u_corridor_matches_relaxation_oracle() {
    // 0.1 m cells; a U of 0.6 m wide corridors around a central wall
    let g = OccupancyGrid::from_fn("u", 40, 30, 0.1, |c, r| {
        let border = c == 0 || r == 0 || c == 39 || r == 29;
        let inner = (7..33).contains(&c) && (7..30).contains(&r);
        if border || inner {
            Cell::Obstacle
        } else {
            Cell::Free
        }
    })
    .unwrap();
    let src = (3, 25);
    let oracle = relaxation_distances(&g, src);
    for (col, row) in [(36, 25), (3, 3), (20, 3), (36, 3), (5, 6), (3, 25)] {
        let d = geodesic_distance(&g, g.cell_center(src.0, src.1), g.cell_center(col, row)).unwrap().unwrap();
        let o = oracle[g.index(col, row)];
        assert!((d - o).abs() < 1e-9, "({col},{row}): {d} vs {o}");
    }
    // every cell, through the field
    let field = vlngen_core::envworld::DistanceField::from_point(&g, g.cell_center(src.0, src.1)).unwrap();
    for i in 0..g.len() {
        match field.meters_at(i) {
            Some(d) => assert!((d - oracle[i]).abs() < 1e-9),
            None => assert!(oracle[i].is_infinite()),
        }
    }
}

#[test]
fn line_traversable_agrees_with_fine_sampling() {
    let g = seven();
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    let (w, h) = g.extent();
    let mut disagreements = Vec::new();
    let mut traversable = 0;
    for _ in 0..200 {
        let a = Point2D::new(rng.gen_range(0.0..w), rng.gen_range(0.0..h));
        let b = Point2D::new(rng.gen_range(0.0..w), rng.gen_range(0.0..h));
        let fast = line_traversable(g, a, b, DEFAULT_CLEARANCE);
        let n = ((a.distance(&b) / (g.resolution() / 10.0)).ceil() as usize).max(1);
        let fine = (0..=n).all(|i| {
            let t = i as f64 / n as f64;
            clear_by_full_scan(g, Point2D::new(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t), DEFAULT_CLEARANCE)
        });
        traversable += fast as usize;
        if fast != fine {
            disagreements.push((a, b, fast, fine));
        }
    }
    assert!(disagreements.is_empty(), "{disagreements:?}");
    assert!(traversable > 0, "sample should include some clear segments");
}

#[test]
fn short_local_segments_agree_with_fine_sampling() {
    let g = seven();
    let centers = navigable_centers(g);
    let mut rng = ChaCha8Rng::seed_from_u64(201);
    for _ in 0..200 {
        let a = centers[rng.gen_range(0..centers.len())];
        let b = Point2D::new(a.x + rng.gen_range(-1.5..1.5), a.y + rng.gen_range(-1.5..1.5));
        if !g.contains(b) {
            continue;
        }
        let n = ((a.distance(&b) / (g.resolution() / 10.0)).ceil() as usize).max(1);
        let fine = (0..=n).all(|i| {
            let t = i as f64 / n as f64;
            clear_by_full_scan(g, Point2D::new(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t), DEFAULT_CLEARANCE)
        });
        assert_eq!(line_traversable(g, a, b, DEFAULT_CLEARANCE), fine, "{a:?} -> {b:?}");
    }
}

#[test]
fn point_clearance_matches_full_scan() {
    let g = seven();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let (w, h) = g.extent();
    for _ in 0..500 {
        let p = Point2D::new(rng.gen_range(0.0..w), rng.gen_range(0.0..h));
        assert_eq!(point_has_clearance(g, p, DEFAULT_CLEARANCE), clear_by_full_scan(g, p, DEFAULT_CLEARANCE), "{p:?}");
    }
}

#[test]
fn samples_are_separated_by_all_pairs_geodesics() {
    let g = plan(3);
    let map = ClearanceMap::new(&g, DEFAULT_CLEARANCE);
    let out = sample_navigable_points(&map, 0.4, 3).unwrap();
    assert!(out.points.len() > 50);
    assert_eq!(out, sample_navigable_points(&map, 0.4, 3).unwrap());
    for p in &out.points {
        assert!(point_has_clearance(&g, *p, DEFAULT_CLEARANCE));
    }
    for (i, &p) in out.points.iter().enumerate() {
        let field = vlngen_core::envworld::DistanceField::from_point(&g, p).unwrap();
        for &q in &out.points[i + 1..] {
            let d = field.distance_to(&g, q).unwrap().expect("connected plan");
            assert!(d > 0.4, "{p:?} {q:?} at {d}");
        }
    }
}

#[test]
fn generation_is_deterministic_and_seed_sensitive() {
    assert_eq!(plan(11), plan(11));
    assert_ne!(to_raster(&plan(11)), to_raster(&plan(12)));
}

#[test]
fn generated_area_is_near_target() {
    for seed in 1..=6 {
        let spec = FloorplanSpec { seed, ..Default::default() };
        let g = generate_floorplan(&spec).unwrap();
        let rel = (g.navigable_area() - spec.target_area()).abs() / spec.target_area();
        assert!(rel <= 0.2, "seed {seed}: {rel}");
        assert_eq!(flood_fill_components(&g), 1);
    }
}

fn pick(centers: &[Point2D]) -> impl Strategy<Value = Point2D> + '_ {
    (0..centers.len()).prop_map(move |i| centers[i])
}

fn seven_centers() -> &'static [Point2D] {
    static CENTERS: OnceLock<Vec<Point2D>> = OnceLock::new();
    CENTERS.get_or_init(|| navigable_centers(seven()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn geodesic_is_symmetric_and_above_the_straight_line(a in pick(seven_centers()), b in pick(seven_centers())) {
        let g = seven();
        let ab = geodesic_distance(g, a, b).unwrap().unwrap();
        let ba = geodesic_distance(g, b, a).unwrap().unwrap();
        prop_assert_eq!(ab, ba);
        prop_assert!(ab >= a.distance(&b) - 2.0 * g.resolution());
    }

    #[test]
    fn traversable_segments_have_short_geodesics(a in pick(seven_centers()), dx in -2.0f64..2.0, dy in -2.0f64..2.0) {
        let g = seven();
        let b = Point2D::new(a.x + dx, a.y + dy);
        prop_assume!(line_traversable(g, a, b, DEFAULT_CLEARANCE));
        let d = geodesic_distance(g, a, b).unwrap().unwrap();
        // an 8-connected path is at most 1/cos(22.5°) times the straight segment
        let octile = 1.0 / (std::f64::consts::PI / 8.0).cos();
        prop_assert!(d <= octile * a.distance(&b) + 2.0 * g.resolution() + 1e-9, "{} vs {}", d, a.distance(&b));
    }

    #[test]
    fn triangle_inequality_holds_on_cell_paths(
        a in pick(seven_centers()), b in pick(seven_centers()), c in pick(seven_centers())
    ) {
        let g = seven();
        let d = |p, q| geodesic_distance(g, p, q).unwrap().unwrap();
        prop_assert!(d(a, c) <= d(a, b) + d(b, c) + 1e-9);
    }
}
