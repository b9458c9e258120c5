//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use rand::Rng;

use vlngen_core::graphbuild::{EdgeOrigin, NavEdge, Viewpoint};
use vlngen_core::trajsample::edge_cost_units;
use vlngen_core::{AgentRun, NavGraph, OccupancyGrid, Point2D, Trajectory, TrajectoryStyle};

/// Viewpoints on a horizontal line, 1 m apart, joined in order.
pub fn line_graph(n: u32) -> NavGraph {
    let vps =
        (0..n).map(|i| Viewpoint { id: i, position: Point2D::new(i as f64 + 0.5, 0.5), cluster_size: 1 }).collect();
    let edges = (1..n).map(|i| NavEdge::new(i - 1, i, 1.0, EdgeOrigin::Rough)).collect();
    NavGraph::new("line", vps, edges).unwrap()
}

/// Up to `max_nodes` viewpoints on a small integer lattice, so equal-length
/// routes are common, joined by a random edge subset.
pub fn random_graph(rng: &mut impl Rng, max_nodes: usize, scene: &str) -> NavGraph {
    let n = rng.gen_range(2..=max_nodes);
    let mut positions: Vec<Point2D> = Vec::new();
    while positions.len() < n {
        let p = Point2D::new(rng.gen_range(0..5) as f64, rng.gen_range(0..4) as f64);
        if !positions.contains(&p) {
            positions.push(p);
        }
    }
    let density = rng.gen_range(0.2..0.6);
    let mut edges = Vec::new();
    for a in 0..n as u32 {
        for b in a + 1..n as u32 {
            if rng.gen_bool(density) {
                let len = positions[a as usize].distance(&positions[b as usize]);
                edges.push(NavEdge::new(a, b, len, EdgeOrigin::Rough));
            }
        }
    }
    let vps = positions
        .into_iter()
        .enumerate()
        .map(|(i, p)| Viewpoint { id: i as u32, position: p, cluster_size: 1 })
        .collect();
    NavGraph::new(scene, vps, edges).unwrap()
}

fn adjacency(graph: &NavGraph) -> Vec<Vec<(u32, u64, f64)>> {
    let mut adj = vec![Vec::new(); graph.node_count()];
    for e in graph.edges() {
        let c = edge_cost_units(e.length);
        adj[e.a as usize].push((e.b, c, e.length));
        adj[e.b as usize].push((e.a, c, e.length));
    }
    adj
}

/// Minimum-cost simple path from `src` to `dst` found by exhaustive
/// depth-first search; ties go to the lexicographically smallest sequence.
pub fn brute_route(graph: &NavGraph, src: u32, dst: u32) -> Option<(Vec<u32>, u64)> {
    fn walk(
        adj: &[Vec<(u32, u64, f64)>],
        dst: u32,
        path: &mut Vec<u32>,
        on_path: &mut [bool],
        cost: u64,
        best: &mut Option<(Vec<u32>, u64)>,
    ) {
        let u = *path.last().unwrap();
        if let Some((_, b)) = best {
            if cost > *b {
                return;
            }
        }
        if u == dst {
            let better = match best {
                None => true,
                Some((bp, bc)) => cost < *bc || (cost == *bc && path.as_slice() < bp.as_slice()),
            };
            if better {
                *best = Some((path.clone(), cost));
            }
            return;
        }
        for &(v, c, _) in &adj[u as usize] {
            if !on_path[v as usize] {
                on_path[v as usize] = true;
                path.push(v);
                walk(adj, dst, path, on_path, cost + c, best);
                path.pop();
                on_path[v as usize] = false;
            }
        }
    }
    let adj = adjacency(graph);
    let mut on_path = vec![false; graph.node_count()];
    on_path[src as usize] = true;
    let mut best = None;
    walk(&adj, dst, &mut vec![src], &mut on_path, 0, &mut best);
    best
}

/// Every ordered pair's brute-force route with an intermediate-node count in
/// `min..=max`.
pub fn brute_r2r(graph: &NavGraph, min: usize, max: usize) -> BTreeSet<Vec<u32>> {
    let n = graph.node_count() as u32;
    let mut out = BTreeSet::new();
    for s in 0..n {
        for d in 0..n {
            if s == d {
                continue;
            }
            if let Some((path, _)) = brute_route(graph, s, d) {
                if (min..=max).contains(&(path.len() - 2)) {
                    out.insert(path);
                }
            }
        }
    }
    out
}

/// All-pairs shortest distances in meters.
pub fn floyd_warshall(graph: &NavGraph) -> Vec<Vec<f64>> {
    let n = graph.node_count();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for e in graph.edges() {
        let (a, b) = (e.a as usize, e.b as usize);
        d[a][b] = d[a][b].min(e.length);
        d[b][a] = d[b][a].min(e.length);
    }
    for k in 0..n {
        for i in 0..n {
            if d[i][k].is_infinite() {
                continue;
            }
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Checks one stored route against the graph and an all-pairs table:
/// adjacency of consecutive nodes, simplicity, stored length equal to the
/// edge sum, and minimality.
pub fn verify_route(graph: &NavGraph, apsp: &[Vec<f64>], nodes: &[u32], length: f64) -> Result<(), String> {
    let mut sum = 0.0;
    for w in nodes.windows(2) {
        let e = graph.edge_between(w[0], w[1]).ok_or_else(|| format!("{} -> {} is not an edge", w[0], w[1]))?;
        sum += e.length;
    }
    let distinct: BTreeSet<_> = nodes.iter().collect();
    if distinct.len() != nodes.len() {
        return Err(format!("{nodes:?} revisits a node"));
    }
    if sum != length {
        return Err(format!("{nodes:?}: stored length {length} but edges sum to {sum}"));
    }
    let best = apsp[nodes[0] as usize][*nodes.last().unwrap() as usize];
    if (sum - best).abs() > 1e-9 * best.max(1.0) {
        return Err(format!("{nodes:?}: length {sum} exceeds shortest {best}"));
    }
    Ok(())
}

/// Full O(n·m) dynamic-programming table for dynamic time warping.
pub fn dtw_table(cost: &[Vec<f64>]) -> f64 {
    let n = cost.len();
    let m = cost[0].len();
    let mut t = vec![vec![f64::INFINITY; m + 1]; n + 1];
    t[0][0] = 0.0;
    for i in 1..=n {
        for j in 1..=m {
            let prev = t[i - 1][j - 1].min(t[i - 1][j]).min(t[i][j - 1]);
            t[i][j] = cost[i - 1][j - 1] + prev;
        }
    }
    t[n][m]
}

/// 8-connected distance between cells `dc`, `dr` apart in an obstacle-free
/// region.
pub fn octile(dc: usize, dr: usize, resolution: f64) -> f64 {
    let (lo, hi) = (dc.min(dr) as f64, dc.max(dr) as f64);
    ((hi - lo) + lo * std::f64::consts::SQRT_2) * resolution
}

/// BLEU-4 computed straight from n-gram counts.
pub struct BleuCounts {
    pub matches: [u64; 4],
    pub totals: [u64; 4],
    pub candidate_length: usize,
    pub reference_length: usize,
}

pub fn bleu_counts(candidate: &[&str], references: &[Vec<&str>]) -> BleuCounts {
    let grams = |toks: &[&str], n: usize| {
        let mut counts: HashMap<Vec<String>, u64> = HashMap::new();
        if toks.len() >= n {
            for i in 0..=toks.len() - n {
                *counts.entry(toks[i..i + n].iter().map(|s| s.to_string()).collect()).or_default() += 1;
            }
        }
        counts
    };
    let mut matches = [0; 4];
    let mut totals = [0; 4];
    for n in 1..=4 {
        let cand = grams(candidate, n);
        let mut max_ref: HashMap<Vec<String>, u64> = HashMap::new();
        for r in references {
            for (g, c) in grams(r, n) {
                let slot = max_ref.entry(g).or_default();
                *slot = (*slot).max(c);
            }
        }
        for (g, c) in &cand {
            matches[n - 1] += (*c).min(max_ref.get(g).copied().unwrap_or(0));
            totals[n - 1] += c;
        }
    }
    let c = candidate.len();
    let r = references.iter().map(Vec::len).min_by_key(|&l| (l.abs_diff(c), l)).unwrap();
    BleuCounts { matches, totals, candidate_length: c, reference_length: r }
}

/// BLEU-4 value: unsmoothed unigram precision, `1 / (total + 1)` for a zero
/// match count at higher orders.
pub fn bleu_value(counts: &BleuCounts) -> f64 {
    if counts.matches[0] == 0 {
        return 0.0;
    }
    let mut log_sum = 0.0;
    for n in 0..4 {
        let p = if counts.matches[n] == 0 {
            1.0 / (counts.totals[n] as f64 + 1.0)
        } else {
            counts.matches[n] as f64 / counts.totals[n] as f64
        };
        log_sum += p.ln();
    }
    let (c, r) = (counts.candidate_length as f64, counts.reference_length as f64);
    let bp = if c < r { (1.0 - r / c).exp() } else { 1.0 };
    bp * (log_sum / 4.0).exp()
}

pub const RES: f64 = 0.5;

/// 30 m × 5 m room walled on its border.
pub fn hall(res: f64) -> OccupancyGrid {
    OccupancyGrid::open_room("hall", 60, 10, res).unwrap()
}

/// Viewpoints 1 m apart on one row of cell centers, scaled by `k`.
pub fn row_graph(k: f64) -> NavGraph {
    let vps = (0..21)
        .map(|i| Viewpoint { id: i, position: Point2D::new(k * (1.25 + i as f64), k * 2.25), cluster_size: 1 })
        .collect();
    let edges = (1..21).map(|i| NavEdge::new(i - 1, i, k, EdgeOrigin::Rough)).collect();
    NavGraph::new("hall", vps, edges).unwrap()
}

pub fn traj(nodes: &[u32], k: f64) -> Trajectory {
    Trajectory {
        scene_id: "hall".into(),
        node_ids: nodes.to_vec(),
        length: k * (nodes.len() - 1) as f64,
        style: TrajectoryStyle::R2rStyle,
        target_object: None,
    }
}

pub fn run_through(graph: &NavGraph, nodes: &[u32]) -> AgentRun {
    AgentRun {
        episode_id: "e".into(),
        visited: nodes.iter().map(|&n| graph.position(n)).collect(),
        selected_object: None,
    }
}

/// A run along [`row_graph`] with metrics worked out by hand for a 3 m
/// success radius.
pub struct Hand {
    pub gt: Vec<u32>,
    pub run: Vec<u32>,
    pub tl: f64,
    pub ne: f64,
    pub sr: f64,
    pub osr: f64,
    pub spl: f64,
    pub gp: f64,
}

pub fn hand_episodes() -> Vec<Hand> {
    let h = |gt: std::ops::RangeInclusive<u32>, run: &[u32], tl, ne, sr, osr, spl, gp| Hand {
        gt: gt.collect(),
        run: run.to_vec(),
        tl,
        ne,
        sr,
        osr,
        spl,
        gp,
    };
    let mut v = vec![
        h(0..=5, &[0, 1, 2, 3, 4, 5], 5.0, 0.0, 1.0, 1.0, 1.0, 5.0),
        h(0..=5, &[0], 0.0, 5.0, 0.0, 0.0, 0.0, 0.0),
        h(0..=5, &[0, 2], 2.0, 3.0, 1.0, 1.0, 1.0, 2.0),
        h(0..=5, &[0, 1], 1.0, 4.0, 0.0, 0.0, 0.0, 1.0),
        h(0..=4, &[0, 8, 4], 12.0, 0.0, 1.0, 1.0, 1.0 / 3.0, 4.0),
        h(0..=4, &[0, 4, 10], 10.0, 6.0, 0.0, 1.0, 0.0, -2.0),
        h(2..=8, &[2, 3, 2, 3, 4, 5, 6, 7, 8], 8.0, 0.0, 1.0, 1.0, 0.75, 6.0),
        h(0..=9, &[0, 5], 5.0, 4.0, 0.0, 0.0, 0.0, 5.0),
        h(3..=7, &[3, 10, 7], 10.0, 0.0, 1.0, 1.0, 0.4, 4.0),
    ];
    let mut back = h(1..=5, &[5, 0], 5.0, 1.0, 1.0, 1.0, 0.8, 3.0);
    back.gt.reverse();
    v.push(back);
    v
}

pub fn interior_point(rng: &mut impl Rng, grid: &OccupancyGrid) -> Point2D {
    let (w, h) = grid.extent();
    let r = grid.resolution();
    Point2D::new(rng.gen_range(r..w - r), rng.gen_range(r..h - r))
}

/// Closed-form open-room distance: the straight line, floored by the
/// 8-connected distance between containing cells.
pub fn room_distance(grid: &OccupancyGrid, p: Point2D, q: Point2D) -> f64 {
    let (pc, pr) = grid.cell_of(p).unwrap();
    let (qc, qr) = grid.cell_of(q).unwrap();
    p.distance(&q).max(octile(pc.abs_diff(qc), pr.abs_diff(qr), grid.resolution()))
}

/// Random ground-truth points as viewpoints, with a random run.
pub fn random_pair(rng: &mut impl Rng, grid: &OccupancyGrid) -> (NavGraph, Trajectory, AgentRun) {
    let m = rng.gen_range(1..=10);
    let n = rng.gen_range(1..=10);
    let vps =
        (0..m).map(|i| Viewpoint { id: i as u32, position: interior_point(rng, grid), cluster_size: 1 }).collect();
    let graph = NavGraph::new("hall", vps, Vec::new()).unwrap();
    let t = Trajectory {
        scene_id: "hall".into(),
        node_ids: (0..m as u32).collect(),
        length: 0.0,
        style: TrajectoryStyle::R2rStyle,
        target_object: None,
    };
    let run = AgentRun {
        episode_id: "e".into(),
        visited: (0..n).map(|_| interior_point(rng, grid)).collect(),
        selected_object: None,
    };
    (graph, t, run)
}
