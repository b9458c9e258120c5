//! Synthetic object annotations and object-anchored routes.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::envworld::{line_traversable, OccupancyGrid, Point2D};
use crate::graphbuild::{NavGraph, ViewpointId};
use crate::seed::{derive_seed, stage_rng};

use super::paths::{subsample_sorted, PathIndex};
use super::{Trajectory, TrajectoryStyle};

pub const OBJECT_VOCABULARY: &[&str] = &[
    "armchair",
    "bed",
    "bench",
    "bookshelf",
    "cabinet",
    "chair",
    "couch",
    "desk",
    "door",
    "dresser",
    "fireplace",
    "lamp",
    "mirror",
    "painting",
    "piano",
    "plant",
    "refrigerator",
    "rug",
    "shelf",
    "sink",
    "stool",
    "table",
    "television",
    "towel",
    "vase",
    "window",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectAnnotation {
    pub object_id: u32,
    pub label: String,
    pub position: Point2D,
    pub anchor_viewpoint: ViewpointId,
    /// Euclidean distance to the anchor viewpoint, meters.
    pub anchor_distance: f64,
    /// Within the distance limit and in line of sight of the anchor.
    pub eligible: bool,
}

/// Index of the viewpoint nearest to `p`; ties go to the smaller id.
fn nearest_viewpoint(graph: &NavGraph, p: Point2D) -> (ViewpointId, f64) {
    graph
        .viewpoints()
        .iter()
        .map(|v| (v.id, v.position.distance(&p)))
        .fold(None, |best: Option<(ViewpointId, f64)>, cur| match best {
            Some(b) if b.1 <= cur.1 => Some(b),
            _ => Some(cur),
        })
        .expect("graph has viewpoints")
}

/// Annotates a single object at `position`.
pub(crate) fn annotate(
    grid: &OccupancyGrid,
    graph: &NavGraph,
    object_id: u32,
    label: &str,
    position: Point2D,
    max_distance: f64,
) -> ObjectAnnotation {
    let (anchor, dist) = nearest_viewpoint(graph, position);
    let eligible = dist <= max_distance && line_traversable(grid, graph.position(anchor), position, 0.0);
    ObjectAnnotation {
        object_id,
        label: label.to_string(),
        position,
        anchor_viewpoint: anchor,
        anchor_distance: dist,
        eligible,
    }
}

/// Places `count` objects at the centers of uniformly drawn FREE cells.
pub fn place_objects(
    grid: &OccupancyGrid,
    graph: &NavGraph,
    count: usize,
    max_distance: f64,
    seed: u64,
) -> Vec<ObjectAnnotation> {
    let free: Vec<usize> = (0..grid.len()).filter(|&i| grid.is_free_index(i)).collect();
    if free.is_empty() || graph.node_count() == 0 {
        return Vec::new();
    }
    let mut rng = stage_rng(seed, "objects");
    (0..count as u32)
        .map(|id| {
            let cell = free[rng.gen_range(0..free.len())];
            let label = OBJECT_VOCABULARY[rng.gen_range(0..OBJECT_VOCABULARY.len())];
            annotate(grid, graph, id, label, grid.index_center(cell), max_distance)
        })
        .collect()
}

/// Canonical routes of `min_edges..=max_edges` edges ending at the anchor of
/// one object, sorted by start node and capped at `per_object_cap`. Empty for
/// ineligible objects.
pub fn object_paths(
    index: &PathIndex<'_>,
    object: &ObjectAnnotation,
    min_edges: usize,
    max_edges: usize,
    per_object_cap: Option<usize>,
    seed: u64,
) -> Vec<Trajectory> {
    if !object.eligible {
        return Vec::new();
    }
    let graph = index.graph();
    let goal = object.anchor_viewpoint;
    let routes: Vec<_> = (0..graph.node_count() as u32)
        .filter(|&s| s != goal)
        .filter_map(|s| index.route(s, goal))
        .filter(|r| (min_edges..=max_edges).contains(&(r.node_ids.len() - 1)))
        .collect();
    let obj_seed = derive_seed(seed, &format!("object/{}", object.object_id));
    subsample_sorted(routes, per_object_cap, obj_seed)
        .into_iter()
        .map(|route| Trajectory {
            scene_id: graph.scene_id().to_string(),
            node_ids: route.node_ids,
            length: route.length,
            style: TrajectoryStyle::ReverieStyle,
            target_object: Some(object.object_id),
        })
        .collect()
}

/// [`object_paths`] for every object, in input order.
pub fn enumerate_object_paths(
    index: &PathIndex<'_>,
    objects: &[ObjectAnnotation],
    min_edges: usize,
    max_edges: usize,
    per_object_cap: Option<usize>,
    seed: u64,
) -> Vec<Trajectory> {
    objects.iter().flat_map(|o| object_paths(index, o, min_edges, max_edges, per_object_cap, seed)).collect()
}
