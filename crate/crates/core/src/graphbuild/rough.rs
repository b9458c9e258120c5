use rand::seq::SliceRandom;

use crate::envworld::ClearanceMap;
use crate::seed::rng_from_seed;

use super::{EdgeOrigin, GraphError, NavEdge, NavGraph, Viewpoint};

/// Connects viewpoints within `max_edge` (Euclidean) whose straight segment
/// keeps the clearance, visiting candidate pairs in a seeded random order and
/// accepting a pair only while both endpoints have degree below
/// `max_degree`. Isolated viewpoints are allowed.
pub fn build_rough_graph(
    scene_id: &str,
    viewpoints: Vec<Viewpoint>,
    map: &ClearanceMap<'_>,
    max_edge: f64,
    max_degree: usize,
    seed: u64,
) -> Result<NavGraph, GraphError> {
    if viewpoints.is_empty() {
        return Err(GraphError::Invalid("rough graph needs at least one viewpoint".into()));
    }
    let n = viewpoints.len();
    let mut candidates = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (p, q) = (viewpoints[i].position, viewpoints[j].position);
            let d = p.distance(&q);
            if d > 0.0 && d <= max_edge && map.segment_clear(p, q) {
                candidates.push((i as u32, j as u32, d));
            }
        }
    }
    candidates.shuffle(&mut rng_from_seed(seed));

    let mut degree = vec![0usize; n];
    let mut edges = Vec::new();
    for (i, j, d) in candidates {
        if degree[i as usize] < max_degree && degree[j as usize] < max_degree {
            degree[i as usize] += 1;
            degree[j as usize] += 1;
            edges.push(NavEdge::new(i, j, d, EdgeOrigin::Rough));
        }
    }
    edges.sort_by_key(|e| (e.a, e.b));
    NavGraph::new(scene_id, viewpoints, edges)
}
