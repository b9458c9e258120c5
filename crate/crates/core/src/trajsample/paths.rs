//! Canonical shortest paths.
//!
//! Path search runs on integer edge costs (edge length rounded to whole
//! micrometres) so that equal-length routes tie exactly. Among the routes of
//! minimum cost the lexicographically smallest node sequence is canonical.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::seq::index::sample;

use crate::graphbuild::{NavGraph, ViewpointId};
use crate::seed::rng_from_seed;

use super::{TrajError, Trajectory, TrajectoryStyle};

const UNREACHABLE: u64 = u64::MAX;

/// Integer cost of an edge of `length` meters.
pub fn edge_cost_units(length: f64) -> u64 {
    ((length * 1e6).round() as u64).max(1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Route {
    pub node_ids: Vec<ViewpointId>,
    pub length: f64,
}

/// Integer single-source costs from `source` over `graph`.
fn costs_from(graph: &NavGraph, source: ViewpointId) -> Vec<u64> {
    let mut dist = vec![UNREACHABLE; graph.node_count()];
    let mut heap = BinaryHeap::new();
    dist[source as usize] = 0;
    heap.push(Reverse((0u64, source)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if d > dist[u as usize] {
            continue;
        }
        for (v, edge) in graph.neighbours(u) {
            let nd = d + edge_cost_units(edge.length);
            if nd < dist[v as usize] {
                dist[v as usize] = nd;
                heap.push(Reverse((nd, v)));
            }
        }
    }
    dist
}

/// Walks from `src` to `dst` always taking the smallest neighbour that stays
/// on a minimum-cost route. `to_dst[v]` is the cost from `v` to `dst`.
fn canonical_walk(graph: &NavGraph, src: ViewpointId, dst: ViewpointId, to_dst: impl Fn(ViewpointId) -> u64) -> Route {
    let mut node_ids = vec![src];
    let mut length = 0.0;
    let mut u = src;
    while u != dst {
        let here = to_dst(u);
        let (v, edge) = graph
            .neighbours(u)
            .find(|(v, e)| {
                let rest = to_dst(*v);
                rest != UNREACHABLE && rest + edge_cost_units(e.length) == here
            })
            .expect("a reachable node has a successor on its shortest route");
        length += edge.length;
        node_ids.push(v);
        u = v;
    }
    Route { node_ids, length }
}

/// Minimum-length route from `src` to `dst`, ties broken by the smallest node
/// sequence.
pub fn shortest_path(graph: &NavGraph, src: ViewpointId, dst: ViewpointId) -> Result<Route, TrajError> {
    let n = graph.node_count() as u32;
    for id in [src, dst] {
        if id >= n {
            return Err(TrajError::InvalidViewpoint(id));
        }
    }
    let to_dst = costs_from(graph, dst);
    if to_dst[src as usize] == UNREACHABLE {
        return Err(TrajError::Unreachable { src, dst });
    }
    Ok(canonical_walk(graph, src, dst, |v| to_dst[v as usize]))
}

/// All-pairs integer costs, for repeated canonical-path queries on one graph.
#[derive(Clone, Debug)]
pub struct PathIndex<'g> {
    graph: &'g NavGraph,
    /// `cost[d * n + v]`: cost from `v` to `d`.
    cost: Vec<u64>,
}

impl<'g> PathIndex<'g> {
    pub fn new(graph: &'g NavGraph) -> Self {
        let n = graph.node_count();
        let mut cost = Vec::with_capacity(n * n);
        for d in 0..n as u32 {
            cost.extend(costs_from(graph, d));
        }
        Self { graph, cost }
    }

    pub fn graph(&self) -> &'g NavGraph {
        self.graph
    }

    pub fn reachable(&self, src: ViewpointId, dst: ViewpointId) -> bool {
        self.cost[dst as usize * self.graph.node_count() + src as usize] != UNREACHABLE
    }

    pub fn route(&self, src: ViewpointId, dst: ViewpointId) -> Option<Route> {
        if !self.reachable(src, dst) {
            return None;
        }
        let n = self.graph.node_count();
        let row = &self.cost[dst as usize * n..(dst as usize + 1) * n];
        Some(canonical_walk(self.graph, src, dst, |v| row[v as usize]))
    }

    /// Node count of the canonical route without materializing it.
    pub fn route_nodes(&self, src: ViewpointId, dst: ViewpointId) -> Option<usize> {
        self.route(src, dst).map(|r| r.node_ids.len())
    }
}

/// The ordered `(src, dst)` pairs selected for instruction routes, sorted.
#[derive(Clone, Debug, PartialEq)]
pub struct R2rPlan {
    pub pairs: Vec<(ViewpointId, ViewpointId)>,
    /// Qualifying pairs before the cap was applied.
    pub total_candidates: usize,
}

impl R2rPlan {
    pub fn trajectories<'a>(&'a self, index: &'a PathIndex<'_>) -> impl Iterator<Item = Trajectory> + 'a {
        self.pairs.iter().map(move |&(s, d)| {
            let route = index.route(s, d).expect("planned pairs are reachable");
            Trajectory {
                scene_id: index.graph().scene_id().to_string(),
                node_ids: route.node_ids,
                length: route.length,
                style: TrajectoryStyle::R2rStyle,
                target_object: None,
            }
        })
    }
}

/// Every ordered pair whose canonical route has between `min_intermediate`
/// and `max_intermediate` intermediate nodes; a seeded uniform subsample of
/// `cap` pairs when there are more.
pub fn enumerate_r2r_pairs(
    index: &PathIndex<'_>,
    min_intermediate: usize,
    max_intermediate: usize,
    cap: Option<usize>,
    seed: u64,
) -> R2rPlan {
    let n = index.graph().node_count() as u32;
    let mut pairs = Vec::new();
    for s in 0..n {
        for d in 0..n {
            if s == d {
                continue;
            }
            if let Some(nodes) = index.route_nodes(s, d) {
                let inter = nodes - 2;
                if (min_intermediate..=max_intermediate).contains(&inter) {
                    pairs.push((s, d));
                }
            }
        }
    }
    let total_candidates = pairs.len();
    let pairs = subsample_sorted(pairs, cap, seed);
    R2rPlan { pairs, total_candidates }
}

pub fn enumerate_r2r_paths(
    graph: &NavGraph,
    min_intermediate: usize,
    max_intermediate: usize,
    cap: Option<usize>,
    seed: u64,
) -> Vec<Trajectory> {
    let index = PathIndex::new(graph);
    let plan = enumerate_r2r_pairs(&index, min_intermediate, max_intermediate, cap, seed);
    plan.trajectories(&index).collect()
}

/// Keeps `cap` items chosen uniformly at random, preserving input order.
pub(crate) fn subsample_sorted<T>(items: Vec<T>, cap: Option<usize>, seed: u64) -> Vec<T> {
    match cap {
        Some(cap) if items.len() > cap => {
            let mut keep: Vec<usize> = sample(&mut rng_from_seed(seed), items.len(), cap).into_vec();
            keep.sort_unstable();
            let mut flags = vec![false; items.len()];
            for k in keep {
                flags[k] = true;
            }
            items.into_iter().zip(flags).filter_map(|(item, f)| f.then_some(item)).collect()
        }
        _ => items,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envworld::Point2D;
    use crate::graphbuild::{EdgeOrigin, NavEdge, Viewpoint};

    fn graph(n: usize, edges: &[(u32, u32, f64)]) -> NavGraph {
        let vps = (0..n)
            .map(|i| Viewpoint { id: i as u32, position: Point2D::new(i as f64, 0.0), cluster_size: 1 })
            .collect();
        let es = edges.iter().map(|&(a, b, l)| NavEdge::new(a, b, l, EdgeOrigin::Rough)).collect();
        NavGraph::new("g", vps, es).unwrap()
    }

    fn line(n: usize) -> NavGraph {
        let edges: Vec<_> = (0..n as u32 - 1).map(|i| (i, i + 1, 1.0)).collect();
        graph(n, &edges)
    }

    #[test]
    fn identity_route() {
        let g = line(3);
        let r = shortest_path(&g, 1, 1).unwrap();
        assert_eq!(r.node_ids, vec![1]);
        assert_eq!(r.length, 0.0);
    }

    #[test]
    fn two_hops_beat_a_long_edge() {
        let g = graph(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)]);
        let r = shortest_path(&g, 0, 2).unwrap();
        assert_eq!(r.node_ids, vec![0, 1, 2]);
        assert_eq!(r.length, 2.0);
    }

    #[test]
    fn ties_pick_smallest_sequence() {
        // square 0-1-3 and 0-2-3 with equal lengths
        let g = graph(4, &[(0, 2, 1.0), (2, 3, 1.0), (0, 1, 1.0), (1, 3, 1.0)]);
        assert_eq!(shortest_path(&g, 0, 3).unwrap().node_ids, vec![0, 1, 3]);
        assert_eq!(shortest_path(&g, 3, 0).unwrap().node_ids, vec![3, 1, 0]);
    }

    #[test]
    fn unreachable_and_invalid_ids() {
        let g = graph(3, &[(0, 1, 1.0)]);
        assert_eq!(shortest_path(&g, 0, 2), Err(TrajError::Unreachable { src: 0, dst: 2 }));
        assert_eq!(shortest_path(&g, 0, 7), Err(TrajError::InvalidViewpoint(7)));
    }

    #[test]
    fn eight_node_line_yields_eighteen() {
        let t = enumerate_r2r_paths(&line(8), 3, 5, None, 0);
        assert_eq!(t.len(), 18);
        assert!(t.iter().all(|t| (5..=7).contains(&t.node_ids.len())));
        let pairs: Vec<_> = t.iter().map(|t| (t.start(), t.goal())).collect();
        let mut sorted = pairs.clone();
        sorted.sort();
        assert_eq!(pairs, sorted);
    }

    #[test]
    fn short_graphs_yield_nothing() {
        assert!(enumerate_r2r_paths(&line(4), 3, 5, None, 0).is_empty());
    }

    #[test]
    fn cap_subsamples_deterministically() {
        let g = line(12);
        let all = enumerate_r2r_paths(&g, 3, 5, None, 0);
        let a = enumerate_r2r_paths(&g, 3, 5, Some(10), 42);
        let b = enumerate_r2r_paths(&g, 3, 5, Some(10), 42);
        assert_eq!(a.len(), 10);
        assert_eq!(a, b);
        assert!(a.iter().all(|t| all.contains(t)));
        assert_ne!(a, enumerate_r2r_paths(&g, 3, 5, Some(10), 43));
    }

    #[test]
    fn index_matches_single_queries() {
        let g = graph(5, &[(0, 1, 1.5), (1, 2, 0.5), (2, 3, 2.0), (0, 3, 3.9), (3, 4, 1.0), (1, 4, 4.0)]);
        let index = PathIndex::new(&g);
        for s in 0..5 {
            for d in 0..5 {
                assert_eq!(index.route(s, d), Some(shortest_path(&g, s, d).unwrap()));
            }
        }
    }
}
