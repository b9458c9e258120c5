//! JSON graph files:
//!
//! ```text
//! { "format_version": 1, "scene_id": "...",
//!   "nodes": [ { "id": 0, "x": 1.25, "y": 3.05, "cluster_size": 4 }, ... ],
//!   "edges": [ { "a": 0, "b": 3, "length": 1.37, "origin": "rough" }, ... ] }
//! ```

use serde::{Deserialize, Serialize};

use crate::envworld::Point2D;

use super::{EdgeOrigin, GraphError, NavEdge, NavGraph, Viewpoint};

pub const GRAPH_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct GraphFile {
    format_version: u32,
    scene_id: String,
    nodes: Vec<NodeRecord>,
    edges: Vec<EdgeRecord>,
}

#[derive(Serialize, Deserialize)]
struct NodeRecord {
    id: u32,
    x: f64,
    y: f64,
    cluster_size: u32,
}

#[derive(Serialize, Deserialize)]
struct EdgeRecord {
    a: u32,
    b: u32,
    length: f64,
    origin: EdgeOrigin,
}

pub fn graph_to_json(graph: &NavGraph) -> String {
    let file = GraphFile {
        format_version: GRAPH_FORMAT_VERSION,
        scene_id: graph.scene_id().to_string(),
        nodes: graph
            .viewpoints()
            .iter()
            .map(|v| NodeRecord { id: v.id, x: v.position.x, y: v.position.y, cluster_size: v.cluster_size })
            .collect(),
        edges: graph
            .edges()
            .iter()
            .map(|e| EdgeRecord { a: e.a, b: e.b, length: e.length, origin: e.origin })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("graph serializes");
    text.push('\n');
    text
}

pub fn graph_from_json(text: &str) -> Result<NavGraph, GraphError> {
    let file: GraphFile = serde_json::from_str(text).map_err(|e| GraphError::Format(e.to_string()))?;
    if file.format_version != GRAPH_FORMAT_VERSION {
        return Err(GraphError::Format(format!("unsupported graph format version {}", file.format_version)));
    }
    let viewpoints = file
        .nodes
        .into_iter()
        .map(|n| Viewpoint { id: n.id, position: Point2D::new(n.x, n.y), cluster_size: n.cluster_size })
        .collect();
    let edges = file
        .edges
        .into_iter()
        .map(|e| {
            if e.a >= e.b {
                Err(GraphError::Format(format!("edge ({}, {}) must be stored with a < b", e.a, e.b)))
            } else {
                Ok(NavEdge { a: e.a, b: e.b, length: e.length, origin: e.origin })
            }
        })
        .collect::<Result<_, _>>()?;
    NavGraph::new(file.scene_id, viewpoints, edges)
}
