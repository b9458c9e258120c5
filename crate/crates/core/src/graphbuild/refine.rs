//! Refinement: repeatedly join the two closest components (closest by
//! geodesic distance over clearance-navigable cells between any of their
//! viewpoints) along that shortest cell path, inserting intermediate
//! viewpoints so that every added edge is a straight traversable segment no
//! longer than the candidate edge radius.

use crate::envworld::grid::passable_neighbours;
use crate::envworld::{ClearanceMap, DistanceField, Point2D};

use super::{EdgeOrigin, GraphError, NavEdge, NavGraph, Viewpoint, DEFAULT_MAX_EDGE};

/// Returns a single-component graph containing every input viewpoint and
/// edge. A connected input is returned unchanged.
pub fn refine_graph(rough: NavGraph, map: &ClearanceMap<'_>) -> Result<NavGraph, GraphError> {
    refine_graph_with(rough, map, DEFAULT_MAX_EDGE)
}

pub fn refine_graph_with(rough: NavGraph, map: &ClearanceMap<'_>, max_edge: f64) -> Result<NavGraph, GraphError> {
    if rough.component_count() <= 1 {
        return Ok(rough);
    }
    let grid = map.grid();
    let (scene_id, mut viewpoints, mut edges) = rough.into_parts();
    loop {
        let graph = NavGraph::new(scene_id.clone(), viewpoints, edges)?;
        let (labels, count) = graph.components();
        if count <= 1 {
            return Ok(graph);
        }
        let (_, vps, es) = graph.into_parts();
        viewpoints = vps;
        edges = es;

        let mut sources = Vec::with_capacity(viewpoints.len());
        for vp in &viewpoints {
            let (c, r) = grid
                .cell_of(vp.position)
                .ok_or(crate::envworld::EnvError::OutOfBounds { x: vp.position.x, y: vp.position.y })?;
            sources.push(grid.index(c, r));
        }
        let mask = map.navigable_mask();
        let field = DistanceField::expand(grid.width(), grid.height(), grid.resolution(), mask, &sources, None);

        // closest pair of differently-labelled regions across a cell boundary
        let mut best: Option<(f64, usize, usize)> = None;
        for u in 0..grid.len() {
            let (Some(du), Some(ou)) = (field.meters_at(u), field.origin_of(u)) else { continue };
            for (v, diagonal) in passable_neighbours(grid.width(), grid.height(), mask, u) {
                let (Some(dv), Some(ov)) = (field.meters_at(v), field.origin_of(v)) else { continue };
                if labels[ou] >= labels[ov] {
                    continue;
                }
                let step = if diagonal { std::f64::consts::SQRT_2 } else { 1.0 } * grid.resolution();
                let total = du + step + dv;
                if best.is_none_or(|(b, _, _)| total < b) {
                    best = Some((total, u, v));
                }
            }
        }
        // viewpoints of different components sharing a cell
        for (i, &si) in sources.iter().enumerate() {
            let o = field.origin_of(si).unwrap_or(i);
            if labels[o] != labels[i] && best.is_none_or(|(b, _, _)| 0.0 < b) {
                let (from, to) = if labels[o] < labels[i] { (o, i) } else { (i, o) };
                best = Some((0.0, sources[from], sources[to]));
            }
        }
        let Some((_, u, v)) = best else {
            return Err(GraphError::Unfixable { components: count });
        };

        let from = field.origin_of(u).expect("reached cell has an origin");
        let to = field.origin_of(v).expect("reached cell has an origin");
        let mut cells = field.path_to(u);
        let mut tail = field.path_to(v);
        tail.reverse();
        cells.extend(tail);
        cells.dedup();

        let mut route: Vec<Point2D> = Vec::with_capacity(cells.len() + 2);
        route.push(viewpoints[from].position);
        route.extend(cells.iter().skip(1).take(cells.len().saturating_sub(2)).map(|&c| grid.index_center(c)));
        route.push(viewpoints[to].position);

        let mut anchor_idx = 0;
        let mut anchor_id = from as u32;
        while anchor_idx + 1 < route.len() {
            let anchor = route[anchor_idx];
            let mut reach = None;
            for k in anchor_idx + 1..route.len() {
                if anchor.distance(&route[k]) <= max_edge && map.segment_clear(anchor, route[k]) {
                    reach = Some(k);
                } else {
                    break;
                }
            }
            let Some(k) = reach else {
                return Err(GraphError::Unfixable { components: count });
            };
            let target_id = if k + 1 == route.len() {
                to as u32
            } else {
                let id = viewpoints.len() as u32;
                viewpoints.push(Viewpoint { id, position: route[k], cluster_size: 0 });
                id
            };
            let length = anchor.distance(&route[k]);
            if length > 0.0 {
                edges.push(NavEdge::new(anchor_id, target_id, length, EdgeOrigin::Refinement));
            } else {
                return Err(GraphError::Invalid(format!("viewpoints {anchor_id} and {target_id} coincide")));
            }
            anchor_idx = k;
            anchor_id = target_id;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envworld::{line_traversable, Cell, OccupancyGrid};

    fn vps(points: &[Point2D]) -> Vec<Viewpoint> {
        points.iter().enumerate().map(|(i, p)| Viewpoint { id: i as u32, position: *p, cluster_size: 1 }).collect()
    }

    #[test]
    fn connected_graph_is_unchanged() {
        let g = OccupancyGrid::open_room("room", 40, 20, 0.1).unwrap();
        let map = ClearanceMap::new(&g, 0.2);
        let graph = NavGraph::new(
            "room",
            vps(&[g.cell_center(10, 10), g.cell_center(20, 10)]),
            vec![NavEdge::new(0, 1, 1.0, EdgeOrigin::Rough)],
        )
        .unwrap();
        assert_eq!(refine_graph(graph.clone(), &map).unwrap(), graph);
    }

    #[test]
    fn two_singletons_in_one_room_get_one_edge() {
        let g = OccupancyGrid::open_room("room", 40, 20, 0.1).unwrap();
        let map = ClearanceMap::new(&g, 0.2);
        let graph = NavGraph::new("room", vps(&[g.cell_center(10, 10), g.cell_center(20, 10)]), vec![]).unwrap();
        let refined = refine_graph(graph, &map).unwrap();
        assert_eq!(refined.edge_count(), 1);
        assert_eq!(refined.node_count(), 2);
        assert_eq!(refined.edges()[0].origin, EdgeOrigin::Refinement);
        assert_eq!(refine_graph(refined.clone(), &map).unwrap(), refined);
    }

    #[test]
    fn joins_rooms_through_a_doorway() {
        // two rooms separated by a wall at col 30 with a door in rows 4..14
        let g = OccupancyGrid::from_fn("rooms", 61, 40, 0.1, |c, r| {
            if c == 0 || r == 0 || c == 60 || r == 39 || ((29..=31).contains(&c) && !(4..14).contains(&r)) {
                Cell::Obstacle
            } else {
                Cell::Free
            }
        })
        .unwrap();
        let map = ClearanceMap::new(&g, 0.2);
        let graph = NavGraph::new("rooms", vps(&[g.cell_center(10, 30), g.cell_center(50, 30)]), vec![]).unwrap();
        let refined = refine_graph(graph, &map).unwrap();
        assert_eq!(refined.component_count(), 1);
        assert!(refined.node_count() > 2);
        for e in refined.edges() {
            assert!(line_traversable(&g, refined.position(e.a), refined.position(e.b), 0.2));
            assert!(e.length <= DEFAULT_MAX_EDGE);
        }
    }

    #[test]
    fn disconnected_space_is_unfixable() {
        let g = OccupancyGrid::from_fn("split", 61, 20, 0.1, |c, r| {
            if c == 0 || r == 0 || c == 60 || r == 19 || c == 30 {
                Cell::Obstacle
            } else {
                Cell::Free
            }
        })
        .unwrap();
        let map = ClearanceMap::new(&g, 0.2);
        let graph = NavGraph::new("split", vps(&[g.cell_center(10, 10), g.cell_center(50, 10)]), vec![]).unwrap();
        assert!(matches!(refine_graph(graph, &map), Err(GraphError::Unfixable { components: 2 })));
    }
}
