use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::envworld::{line_traversable, OccupancyGrid};

use super::{EdgeOrigin, NavGraph};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphQualityReport {
    pub scene_id: String,
    /// Nodes per navigable square meter.
    pub density: f64,
    /// Fraction of edges whose straight segment fails the clearance check.
    pub collision_ratio: f64,
    pub mean_edge_length: f64,
    /// `2 · edge_count / node_count`.
    pub mean_degree: f64,
    pub component_count: usize,
    pub node_count: usize,
    pub edge_count: usize,
    pub rough_edge_count: usize,
    pub refinement_edge_count: usize,
    /// Largest degree counting only rough edges.
    pub max_rough_degree: usize,
    pub navigable_area: f64,
}

/// Recomputes every statistic from geometry; edge origins are only used to
/// split the counts.
pub fn quality_report(graph: &NavGraph, grid: &OccupancyGrid, clearance: f64) -> GraphQualityReport {
    let area = grid.navigable_area();
    let n = graph.node_count();
    let e = graph.edge_count();
    let colliding = graph
        .edges()
        .iter()
        .filter(|edge| !line_traversable(grid, graph.position(edge.a), graph.position(edge.b), clearance))
        .count();
    let total_length: f64 =
        graph.edges().iter().map(|edge| graph.position(edge.a).distance(&graph.position(edge.b))).sum();
    let mut rough_degree = vec![0usize; n];
    let mut rough = 0;
    for edge in graph.edges() {
        if edge.origin == EdgeOrigin::Rough {
            rough += 1;
            rough_degree[edge.a as usize] += 1;
            rough_degree[edge.b as usize] += 1;
        }
    }
    GraphQualityReport {
        scene_id: graph.scene_id().to_string(),
        density: if area > 0.0 { n as f64 / area } else { 0.0 },
        collision_ratio: if e > 0 { colliding as f64 / e as f64 } else { 0.0 },
        mean_edge_length: if e > 0 { total_length / e as f64 } else { 0.0 },
        mean_degree: if n > 0 { 2.0 * e as f64 / n as f64 } else { 0.0 },
        component_count: graph.component_count(),
        node_count: n,
        edge_count: e,
        rough_edge_count: rough,
        refinement_edge_count: e - rough,
        max_rough_degree: rough_degree.into_iter().max().unwrap_or(0),
        navigable_area: area,
    }
}

/// Fixed-column table with the density and collision columns first.
pub fn quality_table(reports: &[GraphQualityReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<16} {:>10} {:>10} {:>7} {:>7} {:>11} {:>11} {:>6}",
        "scene", "density", "collision", "nodes", "edges", "edge_len_m", "mean_deg", "comps"
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{:<16} {:>10.2} {:>9.2}% {:>7} {:>7} {:>11.2} {:>11.2} {:>6}",
            r.scene_id,
            r.density,
            r.collision_ratio * 100.0,
            r.node_count,
            r.edge_count,
            r.mean_edge_length,
            r.mean_degree,
            r.component_count
        );
    }
    out
}
