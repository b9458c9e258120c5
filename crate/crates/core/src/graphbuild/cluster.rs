//! Agglomerative clustering under geodesic distance, cut at a distance
//! threshold, with geodesic medoids as representatives.

use serde::{Deserialize, Serialize};

use crate::envworld::{DistanceField, OccupancyGrid, Point2D};

use super::{GraphError, Viewpoint, ViewpointId};

/// Distance between two clusters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Linkage {
    /// Largest member-to-member distance; a cluster's geodesic diameter stays
    /// below the threshold.
    #[default]
    Complete,
    /// Mean member-to-member distance.
    Average,
}

impl Linkage {
    /// Lance-Williams update for the distance from cluster `k` to `i ∪ j`.
    #[inline]
    fn merge(self, d_ik: f64, d_jk: f64, size_i: f64, size_j: f64) -> f64 {
        match self {
            Linkage::Complete => d_ik.max(d_jk),
            Linkage::Average => (size_i * d_ik + size_j * d_jk) / (size_i + size_j),
        }
    }
}

impl std::str::FromStr for Linkage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "complete" => Ok(Linkage::Complete),
            "average" => Ok(Linkage::Average),
            other => Err(format!("unknown linkage `{other}` (expected complete or average)")),
        }
    }
}

impl std::fmt::Display for Linkage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Linkage::Complete => "complete",
            Linkage::Average => "average",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Clustering {
    /// One viewpoint per cluster, ordered by the lowest input index of its
    /// members.
    pub viewpoints: Vec<Viewpoint>,
    /// Cluster (viewpoint id) of each input point.
    pub labels: Vec<ViewpointId>,
    /// Input index chosen as each cluster's medoid.
    pub medoids: Vec<usize>,
}

/// All-pairs geodesic distances between points, row-major. Unreachable
/// pairs are `f64::INFINITY`.
pub(crate) fn geodesic_matrix(grid: &OccupancyGrid, points: &[Point2D]) -> Result<Vec<f64>, GraphError> {
    let n = points.len();
    let cells: Vec<usize> =
        points.iter().map(|p| crate::envworld::geodesic::free_index(grid, *p)).collect::<Result<_, _>>()?;
    let mask = crate::envworld::geodesic::free_mask(grid);
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        let field = DistanceField::expand(grid.width(), grid.height(), grid.resolution(), &mask, &[cells[i]], None);
        for j in i + 1..n {
            let d = field.meters_at(cells[j]).unwrap_or(f64::INFINITY);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    Ok(dist)
}

/// Merges clusters while the smallest linkage distance is strictly below
/// `threshold`. Ties go to the lexicographically lowest cluster pair,
/// clusters being named by their lowest member index.
pub fn cluster_viewpoints(
    points: &[Point2D],
    grid: &OccupancyGrid,
    threshold: f64,
    linkage: Linkage,
) -> Result<Clustering, GraphError> {
    if points.is_empty() {
        return Err(GraphError::EmptyInput);
    }
    let dist = geodesic_matrix(grid, points)?;
    Ok(cluster_with_matrix(points, &dist, threshold, linkage))
}

/// Same as [`cluster_viewpoints`] over a precomputed row-major distance
/// matrix.
pub fn cluster_with_matrix(points: &[Point2D], dist: &[f64], threshold: f64, method: Linkage) -> Clustering {
    let n = points.len();
    let mut linkage = dist.to_vec();
    let mut size = vec![1usize; n];
    let mut active = vec![true; n];
    let mut owner: Vec<usize> = (0..n).collect();
    let mut nn = vec![usize::MAX; n];
    let mut nn_d = vec![f64::INFINITY; n];

    let nearest = |linkage: &[f64], active: &[bool], i: usize| -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        for k in i + 1..n {
            if active[k] && linkage[i * n + k] < best.1 {
                best = (k, linkage[i * n + k]);
            }
        }
        best
    };
    for i in 0..n {
        (nn[i], nn_d[i]) = nearest(&linkage, &active, i);
    }

    loop {
        let mut pick = None;
        for i in 0..n {
            if active[i] && nn[i] != usize::MAX && pick.is_none_or(|(_, d)| nn_d[i] < d) {
                pick = Some((i, nn_d[i]));
            }
        }
        let Some((i, d)) = pick else { break };
        if !(d < threshold) {
            break;
        }
        let j = nn[i];
        let (si, sj) = (size[i] as f64, size[j] as f64);
        for k in 0..n {
            if active[k] && k != i && k != j {
                let merged = method.merge(linkage[i * n + k], linkage[j * n + k], si, sj);
                linkage[i * n + k] = merged;
                linkage[k * n + i] = merged;
            }
        }
        size[i] += size[j];
        active[j] = false;
        for o in owner.iter_mut() {
            if *o == j {
                *o = i;
            }
        }
        for k in 0..n {
            if !active[k] {
                continue;
            }
            if k == i || nn[k] == i || nn[k] == j {
                (nn[k], nn_d[k]) = nearest(&linkage, &active, k);
            } else if k < i {
                let d = linkage[k * n + i];
                if d < nn_d[k] || (d == nn_d[k] && i < nn[k]) {
                    nn[k] = i;
                    nn_d[k] = d;
                }
            }
        }
    }

    // clusters ordered by lowest member index == their surviving owner index
    let roots: Vec<usize> = (0..n).filter(|&i| active[i]).collect();
    let mut root_to_id = vec![u32::MAX; n];
    for (id, &r) in roots.iter().enumerate() {
        root_to_id[r] = id as u32;
    }
    let labels: Vec<ViewpointId> = owner.iter().map(|&o| root_to_id[o]).collect();

    let mut viewpoints = Vec::with_capacity(roots.len());
    let mut medoids = Vec::with_capacity(roots.len());
    for (id, &root) in roots.iter().enumerate() {
        let members: Vec<usize> = (0..n).filter(|&p| owner[p] == root).collect();
        let mut best = (members[0], f64::INFINITY);
        for &m in &members {
            let total: f64 = members.iter().map(|&o| dist[m * n + o]).sum();
            if total < best.1 {
                best = (m, total);
            }
        }
        medoids.push(best.0);
        viewpoints.push(Viewpoint { id: id as u32, position: points[best.0], cluster_size: members.len() as u32 });
    }
    Clustering { viewpoints, labels, medoids }
}
