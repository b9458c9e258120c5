//! Navigation-graph construction: cluster dense viewpoint samples, connect
//! them into a rough graph, refine it until it is a single traversable
//! component, and report graph-quality statistics.

mod cluster;
mod io;
mod quality;
mod refine;
mod rough;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::envworld::{sample_navigable_points, ClearanceMap, EnvError, OccupancyGrid, Point2D};
use crate::seed::derive_seed;

pub use cluster::{cluster_viewpoints, cluster_with_matrix, Clustering, Linkage};
pub use io::{graph_from_json, graph_to_json, GRAPH_FORMAT_VERSION};
pub use quality::{quality_report, quality_table, GraphQualityReport};
pub use refine::{refine_graph, refine_graph_with};
pub use rough::build_rough_graph;

pub type ViewpointId = u32;

/// Agglomerative clustering cut, meters.
pub const DEFAULT_CLUSTER_THRESHOLD: f64 = 1.0;
/// Candidate edge radius, meters.
pub const DEFAULT_MAX_EDGE: f64 = 5.0;
/// Degree cap for rough edges.
pub const DEFAULT_MAX_DEGREE: usize = 5;

/// Parameters of the full graph-building pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphParams {
    pub clearance: f64,
    pub min_geo_sep: f64,
    pub cluster_threshold: f64,
    pub linkage: Linkage,
    pub max_edge: f64,
    pub max_degree: usize,
}

impl Default for GraphParams {
    fn default() -> Self {
        Self {
            clearance: crate::envworld::DEFAULT_CLEARANCE,
            min_geo_sep: crate::envworld::DEFAULT_MIN_GEO_SEP,
            cluster_threshold: DEFAULT_CLUSTER_THRESHOLD,
            linkage: Linkage::default(),
            max_edge: DEFAULT_MAX_EDGE,
            max_degree: DEFAULT_MAX_DEGREE,
        }
    }
}

/// Output of [`build_navigation_graph`].
#[derive(Clone, Debug)]
pub struct SceneGraph {
    pub graph: NavGraph,
    pub raw_samples: usize,
    pub clustered: usize,
    pub rough_components: usize,
}

/// Sample → cluster → rough graph → refine, for one grid. Stage seeds are
/// derived from `seed`.
pub fn build_navigation_graph(grid: &OccupancyGrid, params: &GraphParams, seed: u64) -> Result<SceneGraph, GraphError> {
    let map = ClearanceMap::new(grid, params.clearance);
    let samples = sample_navigable_points(&map, params.min_geo_sep, derive_seed(seed, "sample"))?;
    if samples.is_empty() {
        return Err(GraphError::Invalid(format!("scene {} has no navigable position", grid.scene_id())));
    }
    let clustering = cluster_viewpoints(&samples.points, grid, params.cluster_threshold, params.linkage)?;
    let clustered = clustering.viewpoints.len();
    let rough = build_rough_graph(
        grid.scene_id(),
        clustering.viewpoints,
        &map,
        params.max_edge,
        params.max_degree,
        derive_seed(seed, "rough"),
    )?;
    let rough_components = rough.component_count();
    let graph = refine_graph_with(rough, &map, params.max_edge)?;
    Ok(SceneGraph { graph, raw_samples: samples.points.len(), clustered, rough_components })
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("invalid graph: {0}")]
    Invalid(String),
    #[error("cannot connect {components} components: free space is disconnected")]
    Unfixable { components: usize },
    #[error("clustering needs at least one point")]
    EmptyInput,
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("graph file: {0}")]
    Format(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Viewpoint {
    pub id: ViewpointId,
    pub position: Point2D,
    /// Raw samples merged into this viewpoint; 0 for viewpoints inserted by
    /// refinement.
    pub cluster_size: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeOrigin {
    Rough,
    Refinement,
}

/// Undirected edge; endpoints are stored with `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NavEdge {
    pub a: ViewpointId,
    pub b: ViewpointId,
    pub length: f64,
    pub origin: EdgeOrigin,
}

impl NavEdge {
    pub fn new(u: ViewpointId, v: ViewpointId, length: f64, origin: EdgeOrigin) -> Self {
        Self { a: u.min(v), b: u.max(v), length, origin }
    }

    pub fn other(&self, id: ViewpointId) -> ViewpointId {
        if self.a == id {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NavGraph {
    scene_id: String,
    viewpoints: Vec<Viewpoint>,
    edges: Vec<NavEdge>,
    /// Per viewpoint: `(neighbour, edge index)` sorted by neighbour id.
    adjacency: Vec<Vec<(ViewpointId, usize)>>,
}

impl NavGraph {
    /// Validates ids (dense, in order), endpoints and simplicity.
    pub fn new(
        scene_id: impl Into<String>,
        viewpoints: Vec<Viewpoint>,
        edges: Vec<NavEdge>,
    ) -> Result<Self, GraphError> {
        for (i, vp) in viewpoints.iter().enumerate() {
            if vp.id as usize != i {
                return Err(GraphError::Invalid(format!("viewpoint at position {i} has id {}", vp.id)));
            }
            if !vp.position.is_finite() {
                return Err(GraphError::Invalid(format!("viewpoint {i} has a non-finite position")));
            }
        }
        let n = viewpoints.len();
        let mut adjacency: Vec<Vec<(ViewpointId, usize)>> = vec![Vec::new(); n];
        for (k, e) in edges.iter().enumerate() {
            if e.a >= e.b {
                return Err(GraphError::Invalid(format!("edge {k} ({}, {}) is a self-loop or unordered", e.a, e.b)));
            }
            if e.b as usize >= n {
                return Err(GraphError::Invalid(format!("edge {k} references missing viewpoint {}", e.b)));
            }
            if !(e.length.is_finite() && e.length > 0.0) {
                return Err(GraphError::Invalid(format!("edge {k} has length {}", e.length)));
            }
            adjacency[e.a as usize].push((e.b, k));
            adjacency[e.b as usize].push((e.a, k));
        }
        for (i, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(GraphError::Invalid(format!("duplicate edge at viewpoint {i}")));
            }
        }
        Ok(Self { scene_id: scene_id.into(), viewpoints, edges, adjacency })
    }

    pub fn scene_id(&self) -> &str {
        &self.scene_id
    }

    pub fn viewpoints(&self) -> &[Viewpoint] {
        &self.viewpoints
    }

    pub fn edges(&self) -> &[NavEdge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.viewpoints.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn position(&self, id: ViewpointId) -> Point2D {
        self.viewpoints[id as usize].position
    }

    pub fn degree(&self, id: ViewpointId) -> usize {
        self.adjacency[id as usize].len()
    }

    /// Neighbours of `id` in ascending id order, with the connecting edge.
    pub fn neighbours(&self, id: ViewpointId) -> impl Iterator<Item = (ViewpointId, &NavEdge)> + '_ {
        self.adjacency[id as usize].iter().map(move |&(n, k)| (n, &self.edges[k]))
    }

    pub fn edge_between(&self, u: ViewpointId, v: ViewpointId) -> Option<&NavEdge> {
        let list = self.adjacency.get(u as usize)?;
        list.binary_search_by_key(&v, |&(n, _)| n).ok().map(|p| &self.edges[list[p].1])
    }

    /// Component label per viewpoint (labels numbered by lowest member id)
    /// and the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.node_count()];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.node_count() {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            queue.push_back(start as ViewpointId);
            while let Some(u) = queue.pop_front() {
                for (v, _) in self.neighbours(u) {
                    if label[v as usize] == usize::MAX {
                        label[v as usize] = count;
                        queue.push_back(v);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn component_count(&self) -> usize {
        self.components().1
    }

    pub(crate) fn into_parts(self) -> (String, Vec<Viewpoint>, Vec<NavEdge>) {
        (self.scene_id, self.viewpoints, self.edges)
    }
}
