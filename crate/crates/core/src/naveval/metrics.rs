use std::collections::HashMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::envworld::{DistanceField, OccupancyGrid, Point2D};
use crate::graphbuild::NavGraph;
use crate::trajsample::Trajectory;

use super::{AgentRun, EvalError};

/// Per-episode metrics, or their means after [`aggregate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub tl: f64,
    pub ne: f64,
    pub sr: f64,
    pub osr: f64,
    pub spl: f64,
    pub ndtw: f64,
    pub gp: f64,
    /// Geodesic start-to-goal distance of the episode.
    pub shortest: f64,
    pub rgs: Option<f64>,
    pub rgspl: Option<f64>,
}

/// Computes metrics for runs in one scene, reusing distance fields rooted at
/// ground-truth viewpoints.
///
/// Point distance is the larger of the straight-line distance and the
/// 8-connected FREE-cell distance between the containing cells, so it is
/// zero only for identical points and never below the straight line.
pub struct Evaluator<'a> {
    grid: &'a OccupancyGrid,
    graph: &'a NavGraph,
    success_radius: f64,
    fields: HashMap<usize, DistanceField>,
}

impl<'a> Evaluator<'a> {
    pub fn new(grid: &'a OccupancyGrid, graph: &'a NavGraph, success_radius: f64) -> Result<Self, EvalError> {
        if !(success_radius > 0.0 && success_radius.is_finite()) {
            return Err(EvalError::InvalidRadius(success_radius));
        }
        Ok(Self { grid, graph, success_radius, fields: HashMap::new() })
    }

    pub fn success_radius(&self) -> f64 {
        self.success_radius
    }

    /// Distance from `p` to the anchor point `q`.
    pub fn distance(&mut self, p: Point2D, q: Point2D) -> Result<f64, EvalError> {
        let (col, row) = self.grid.cell_of(q).ok_or(crate::envworld::EnvError::OutOfBounds { x: q.x, y: q.y })?;
        let key = self.grid.index(col, row);
        if !self.fields.contains_key(&key) {
            let field = DistanceField::from_point(self.grid, q)?;
            self.fields.insert(key, field);
        }
        let cells = self.fields[&key].distance_to(self.grid, p)?.ok_or(EvalError::Unreachable { x: p.x, y: p.y })?;
        Ok(cells.max(p.distance(&q)))
    }

    fn gt_points(&self, trajectory: &Trajectory) -> Result<Vec<Point2D>, EvalError> {
        if trajectory.node_ids.is_empty() {
            return Err(EvalError::EmptyTrajectory);
        }
        let n = self.graph.node_count() as u32;
        trajectory
            .node_ids
            .iter()
            .map(|&id| if id < n { Ok(self.graph.position(id)) } else { Err(EvalError::UnknownViewpoint(id)) })
            .collect()
    }

    pub fn evaluate(&mut self, trajectory: &Trajectory, run: &AgentRun) -> Result<EvalResult, EvalError> {
        let stop = run.stop().ok_or(EvalError::EmptyRun)?;
        let gt = self.gt_points(trajectory)?;
        let (start, goal) = (gt[0], *gt.last().expect("non-empty"));
        let radius = self.success_radius;

        let tl: f64 = run.visited.windows(2).map(|w| w[0].distance(&w[1])).sum();
        let ne = self.distance(stop, goal)?;
        let shortest = self.distance(start, goal)?;
        let sr = if ne <= radius { 1.0 } else { 0.0 };
        let mut osr = 0.0;
        for &p in &run.visited {
            if self.distance(p, goal)? <= radius {
                osr = 1.0;
                break;
            }
        }
        let path_weight = if shortest == 0.0 { 1.0 } else { shortest / tl.max(shortest) };
        let spl = sr * path_weight;

        let mut cost = vec![0.0; run.visited.len() * gt.len()];
        for (j, &g) in gt.iter().enumerate() {
            for (i, &p) in run.visited.iter().enumerate() {
                cost[i * gt.len() + j] = self.distance(p, g)?;
            }
        }
        let warp = dtw(run.visited.len(), gt.len(), |i, j| cost[i * gt.len() + j]);
        let ndtw = (-warp / (gt.len() as f64 * radius)).exp();
        let gp = shortest - ne;

        let (rgs, rgspl) = match trajectory.target_object {
            Some(target) => {
                let hit = if run.selected_object == Some(target) { sr } else { 0.0 };
                (Some(hit), Some(hit * path_weight))
            }
            None => (None, None),
        };
        Ok(EvalResult { tl, ne, sr, osr, spl, ndtw, gp, shortest, rgs, rgspl })
    }
}

/// Metrics for a single run. Use [`Evaluator`] to share distance fields
/// across many runs in one scene.
pub fn evaluate_run(
    trajectory: &Trajectory,
    run: &AgentRun,
    grid: &OccupancyGrid,
    graph: &NavGraph,
    success_radius: f64,
) -> Result<EvalResult, EvalError> {
    Evaluator::new(grid, graph, success_radius)?.evaluate(trajectory, run)
}

/// Dynamic time warping cost between sequences of lengths `n` and `m` under
/// the pairwise cost `d(i, j)`.
pub fn dtw(n: usize, m: usize, d: impl Fn(usize, usize) -> f64) -> f64 {
    if n == 0 || m == 0 {
        return f64::INFINITY;
    }
    let mut prev = vec![f64::INFINITY; m + 1];
    let mut cur = vec![f64::INFINITY; m + 1];
    prev[0] = 0.0;
    for i in 1..=n {
        cur[0] = f64::INFINITY;
        for j in 1..=m {
            let best = prev[j].min(cur[j - 1]).min(prev[j - 1]);
            cur[j] = d(i - 1, j - 1) + best;
        }
        std::mem::swap(&mut prev, &mut cur);
        prev[0] = f64::INFINITY;
    }
    prev[m]
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Field-wise means in input order. Object-grounding fields average over the
/// results that carry them.
pub fn aggregate(results: &[EvalResult]) -> Result<EvalResult, EvalError> {
    if results.is_empty() {
        return Err(EvalError::EmptyAggregate);
    }
    let m = |f: fn(&EvalResult) -> f64| mean(results.iter().map(f)).expect("non-empty");
    Ok(EvalResult {
        tl: m(|r| r.tl),
        ne: m(|r| r.ne),
        sr: m(|r| r.sr),
        osr: m(|r| r.osr),
        spl: m(|r| r.spl),
        ndtw: m(|r| r.ndtw),
        gp: m(|r| r.gp),
        shortest: m(|r| r.shortest),
        rgs: mean(results.iter().filter_map(|r| r.rgs)),
        rgspl: mean(results.iter().filter_map(|r| r.rgspl)),
    })
}

pub const RESULT_COLUMNS: [&str; 9] = ["TL", "NE", "OSR", "SR", "SPL", "nDTW", "GP", "RGS", "RGSPL"];

/// Tab-separated table, one row per `(label, result)`. Rates are printed as
/// percentages, distances in meters; absent values print as `-`.
pub fn results_table<'r>(rows: impl IntoIterator<Item = (&'r str, &'r EvalResult)>) -> String {
    let mut out = String::from("episode");
    for c in RESULT_COLUMNS {
        out.push('\t');
        out.push_str(c);
    }
    out.push('\n');
    let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{:.2}", v * 100.0));
    for (label, r) in rows {
        let _ = writeln!(
            out,
            "{label}\t{:.2}\t{:.2}\t{:.2}\t{:.2}\t{:.2}\t{:.2}\t{:.2}\t{}\t{}",
            r.tl,
            r.ne,
            r.osr * 100.0,
            r.sr * 100.0,
            r.spl * 100.0,
            r.ndtw * 100.0,
            r.gp,
            opt(r.rgs),
            opt(r.rgspl),
        );
    }
    out
}
