//! Trajectory enumeration over refined navigation graphs: bounded-length
//! canonical shortest routes between viewpoint pairs, and object-anchored
//! routes ending next to a target object.

mod objects;
mod paths;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphbuild::ViewpointId;

pub use objects::{enumerate_object_paths, object_paths, place_objects, ObjectAnnotation, OBJECT_VOCABULARY};
pub use paths::{edge_cost_units, enumerate_r2r_pairs, enumerate_r2r_paths, shortest_path, PathIndex, R2rPlan, Route};

/// Intermediate-node bounds for instruction routes.
pub const DEFAULT_MIN_INTERMEDIATE: usize = 3;
pub const DEFAULT_MAX_INTERMEDIATE: usize = 5;
/// Edge-count bounds for object-anchored routes.
pub const DEFAULT_MIN_OBJECT_EDGES: usize = 4;
pub const DEFAULT_MAX_OBJECT_EDGES: usize = 9;
/// Objects farther than this from their anchor viewpoint are never targets.
pub const DEFAULT_MAX_OBJECT_DISTANCE: f64 = 3.0;
pub const DEFAULT_PER_SCENE_CAP: usize = 50_000;
pub const DEFAULT_PER_OBJECT_CAP: usize = 200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrajError {
    #[error("viewpoint {dst} is unreachable from {src}")]
    Unreachable { src: ViewpointId, dst: ViewpointId },
    #[error("viewpoint {0} does not exist")]
    InvalidViewpoint(ViewpointId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryStyle {
    /// Fine-grained instruction route: start, 3–5 intermediates, goal.
    R2rStyle,
    /// Route of 4–9 edges ending at a target object's anchor viewpoint.
    ReverieStyle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub scene_id: String,
    pub node_ids: Vec<ViewpointId>,
    /// Sum of edge lengths in path order, meters.
    pub length: f64,
    pub style: TrajectoryStyle,
    pub target_object: Option<u32>,
}

impl Trajectory {
    pub fn start(&self) -> ViewpointId {
        self.node_ids[0]
    }

    pub fn goal(&self) -> ViewpointId {
        *self.node_ids.last().expect("trajectory is non-empty")
    }

    pub fn edge_count(&self) -> usize {
        self.node_ids.len().saturating_sub(1)
    }
}
