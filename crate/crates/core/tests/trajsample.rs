mod common;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vlngen_core::envworld::{generate_floorplan, line_traversable, FloorplanSpec};
use vlngen_core::graphbuild::{build_navigation_graph, GraphParams, NavEdge, Viewpoint};
use vlngen_core::trajsample::{
    enumerate_object_paths, enumerate_r2r_paths, object_paths, place_objects, shortest_path, PathIndex,
};
use vlngen_core::{NavGraph, OccupancyGrid, TrajectoryStyle};

use common::{brute_r2r, brute_route, floyd_warshall, line_graph, random_graph, verify_route};

fn scene(seed: u64) -> (OccupancyGrid, NavGraph) {
    let spec = FloorplanSpec { scene_id: format!("plan{seed}"), seed, ..Default::default() };
    let grid = generate_floorplan(&spec).unwrap();
    let graph = build_navigation_graph(&grid, &GraphParams::default(), seed).unwrap().graph;
    (grid, graph)
}

/// Subgraph induced by the first `k` nodes reached by BFS from `root`,
/// relabelled in ascending original id so relative order is kept.
fn ball(graph: &NavGraph, root: u32, k: usize) -> (NavGraph, Vec<u32>) {
    let mut seen = BTreeSet::from([root]);
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for (v, _) in graph.neighbours(u) {
            if seen.len() < k && seen.insert(v) {
                queue.push_back(v);
            }
        }
    }
    let members: Vec<u32> = seen.into_iter().collect();
    let new_id: BTreeMap<u32, u32> = members.iter().enumerate().map(|(i, &o)| (o, i as u32)).collect();
    let vps = members
        .iter()
        .enumerate()
        .map(|(i, &o)| Viewpoint { id: i as u32, position: graph.position(o), cluster_size: 1 })
        .collect();
    let edges = graph
        .edges()
        .iter()
        .filter_map(|e| Some(NavEdge::new(*new_id.get(&e.a)?, *new_id.get(&e.b)?, e.length, e.origin)))
        .collect();
    (NavGraph::new("ball", vps, edges).unwrap(), members)
}

#[test]
fn random_pairs_match_exhaustive_search_on_subgraphs() {
    let (_, graph) = scene(7);
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for _ in 0..100 {
        let root = rng.gen_range(0..graph.node_count() as u32);
        let (sub, _) = ball(&graph, root, 12);
        let n = sub.node_count() as u32;
        let (s, d) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let got = shortest_path(&sub, s, d).unwrap();
        let (path, _) = brute_route(&sub, s, d).expect("ball is connected");
        assert_eq!(got.node_ids, path);
    }
}

#[test]
fn small_random_graphs_enumerate_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for g in 0..50 {
        let graph = random_graph(&mut rng, 12, &format!("g{g}"));
        let got: BTreeSet<Vec<u32>> =
            enumerate_r2r_paths(&graph, 3, 5, None, 1).into_iter().map(|t| t.node_ids).collect();
        assert_eq!(got, brute_r2r(&graph, 3, 5), "graph {g}");
    }
}

#[test]
fn line_of_eight_yields_eighteen() {
    let t = enumerate_r2r_paths(&line_graph(8), 3, 5, None, 0);
    assert_eq!(t.len(), 18);
    assert!(t.iter().all(|t| (5..=7).contains(&t.node_ids.len())));
}

#[test]
fn scene_routes_pass_independent_reverification() {
    let (_, graph) = scene(7);
    let apsp = floyd_warshall(&graph);
    let trajs = enumerate_r2r_paths(&graph, 3, 5, Some(50_000), 7);
    assert!(!trajs.is_empty());
    let mut pairs = BTreeSet::new();
    for t in &trajs {
        verify_route(&graph, &apsp, &t.node_ids, t.length).unwrap();
        assert!((5..=7).contains(&t.node_ids.len()));
        assert_eq!(t.style, TrajectoryStyle::R2rStyle);
        assert!(pairs.insert((t.start(), t.goal())));
    }
    let sorted: Vec<_> = pairs.iter().copied().collect();
    let order: Vec<_> = trajs.iter().map(|t| (t.start(), t.goal())).collect();
    assert_eq!(order, sorted);
}

#[test]
fn capped_enumeration_is_a_deterministic_subset() {
    let (_, graph) = scene(7);
    let full: BTreeSet<_> = enumerate_r2r_paths(&graph, 3, 5, None, 1).into_iter().map(|t| t.node_ids).collect();
    let a = enumerate_r2r_paths(&graph, 3, 5, Some(500), 9);
    let b = enumerate_r2r_paths(&graph, 3, 5, Some(500), 9);
    let c = enumerate_r2r_paths(&graph, 3, 5, Some(500), 10);
    assert_eq!(a.len(), 500);
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(a.iter().all(|t| full.contains(&t.node_ids)));
}

#[test]
fn anchors_are_nearest_viewpoints() {
    let (grid, graph) = scene(5);
    let objects = place_objects(&grid, &graph, 40, 3.0, 5);
    assert_eq!(objects.len(), 40);
    for o in &objects {
        assert!(grid.is_free_point(o.position));
        let best = graph
            .viewpoints()
            .iter()
            .min_by(|a, b| {
                o.position.distance(&a.position).total_cmp(&o.position.distance(&b.position)).then(a.id.cmp(&b.id))
            })
            .unwrap();
        assert_eq!(o.anchor_viewpoint, best.id);
        assert_eq!(o.anchor_distance, o.position.distance(&best.position));
        let rule = o.anchor_distance <= 3.0 && line_traversable(&grid, best.position, o.position, 0.0);
        assert_eq!(o.eligible, rule, "object {}", o.object_id);
    }
}

#[test]
fn object_paths_match_brute_force_over_start_nodes() {
    let (grid, graph) = scene(5);
    let objects = place_objects(&grid, &graph, 12, 3.0, 5);
    let index = PathIndex::new(&graph);
    let apsp = floyd_warshall(&graph);
    for o in &objects {
        let got = object_paths(&index, o, 4, 9, None, 3);
        if !o.eligible {
            assert!(got.is_empty());
            continue;
        }
        let mut expected = Vec::new();
        for s in 0..graph.node_count() as u32 {
            if s == o.anchor_viewpoint {
                continue;
            }
            let (path, _) = descent_route(&graph, &apsp, s, o.anchor_viewpoint);
            if (4..=9).contains(&(path.len() - 1)) {
                expected.push(path);
            }
        }
        let got_nodes: Vec<_> = got.iter().map(|t| t.node_ids.clone()).collect();
        assert_eq!(got_nodes, expected, "object {}", o.object_id);
        for t in &got {
            assert_eq!(t.goal(), o.anchor_viewpoint);
            assert_eq!(t.target_object, Some(o.object_id));
            assert_eq!(t.style, TrajectoryStyle::ReverieStyle);
            verify_route(&graph, &apsp, &t.node_ids, t.length).unwrap();
        }
    }
}

/// Canonical route by greedy descent on exact all-pairs distances; the
/// exhaustive search is too slow for full scenes.
fn descent_route(graph: &NavGraph, apsp: &[Vec<f64>], s: u32, d: u32) -> (Vec<u32>, f64) {
    let units = |x: f64| ((x * 1e6).round() as u64).max(1);
    // integer costs to `d` so ties are exact
    let n = graph.node_count();
    let mut dist = vec![u64::MAX; n];
    dist[d as usize] = 0;
    let mut done = vec![false; n];
    for _ in 0..n {
        let u = (0..n).filter(|&i| !done[i] && dist[i] != u64::MAX).min_by_key(|&i| dist[i]);
        let Some(u) = u else { break };
        done[u] = true;
        for (v, e) in graph.neighbours(u as u32) {
            let nd = dist[u] + units(e.length);
            if nd < dist[v as usize] {
                dist[v as usize] = nd;
            }
        }
    }
    let mut path = vec![s];
    let mut u = s;
    while u != d {
        let next = graph
            .neighbours(u)
            .filter(|(v, e)| dist[*v as usize] != u64::MAX && dist[*v as usize] + units(e.length) == dist[u as usize])
            .map(|(v, _)| v)
            .min()
            .unwrap();
        path.push(next);
        u = next;
    }
    (path, apsp[s as usize][d as usize])
}

#[test]
fn per_object_cap_keeps_a_sorted_subset() {
    let (grid, graph) = scene(5);
    let objects = place_objects(&grid, &graph, 12, 3.0, 5);
    let index = PathIndex::new(&graph);
    let full = enumerate_object_paths(&index, &objects, 4, 9, None, 3);
    let capped = enumerate_object_paths(&index, &objects, 4, 9, Some(5), 3);
    assert!(capped.len() < full.len());
    let full_set: BTreeSet<_> = full.iter().map(|t| t.node_ids.clone()).collect();
    for o in &objects {
        let mine: Vec<_> = capped.iter().filter(|t| t.target_object == Some(o.object_id)).collect();
        assert!(mine.len() <= 5);
        assert!(mine.windows(2).all(|w| w[0].start() < w[1].start()));
        assert!(mine.iter().all(|t| full_set.contains(&t.node_ids)));
    }
}

#[test]
fn brute_force_helper_agrees_with_exhaustive_search_on_small_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for g in 0..20 {
        let graph = random_graph(&mut rng, 9, &format!("h{g}"));
        let apsp = floyd_warshall(&graph);
        for s in 0..graph.node_count() as u32 {
            for d in 0..graph.node_count() as u32 {
                if let Some((path, _)) = brute_route(&graph, s, d) {
                    assert_eq!(descent_route(&graph, &apsp, s, d).0, path);
                }
            }
        }
    }
}
