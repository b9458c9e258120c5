//! Scripted followers.

use rand::Rng;

use crate::graphbuild::{NavGraph, ViewpointId};
use crate::seed::{derive_seed, rng_from_seed};
use crate::trajsample::{shortest_path, Trajectory};

use super::{AgentRun, EvalError};

/// Visits the ground-truth viewpoints in order.
pub fn oracle_follower(episode_id: &str, trajectory: &Trajectory, graph: &NavGraph) -> AgentRun {
    AgentRun {
        episode_id: episode_id.to_string(),
        visited: trajectory.node_ids.iter().map(|&id| graph.position(id)).collect(),
        selected_object: trajectory.target_object,
    }
}

/// Follows the route but, before each move, with probability `p_wrong` steps
/// to a random neighbour other than the planned one and replans a shortest
/// route from there. Stops at the goal or after three times the ground-truth
/// node count.
///
/// Every step draws the same random numbers whatever `p_wrong` is, so runs
/// with different probabilities share their noise.
pub fn noisy_follower(
    episode_id: &str,
    trajectory: &Trajectory,
    graph: &NavGraph,
    p_wrong: f64,
    seed: u64,
) -> Result<AgentRun, EvalError> {
    if !(0.0..=1.0).contains(&p_wrong) {
        return Err(EvalError::InvalidProbability(p_wrong));
    }
    let nodes = &trajectory.node_ids;
    let (&start, &goal) = match (nodes.first(), nodes.last()) {
        (Some(s), Some(g)) => (s, g),
        _ => return Err(EvalError::EmptyTrajectory),
    };
    let n = graph.node_count() as u32;
    if let Some(&bad) = nodes.iter().find(|&&id| id >= n) {
        return Err(EvalError::UnknownViewpoint(bad));
    }
    let mut rng = rng_from_seed(derive_seed(seed, "noisy"));
    let budget = 3 * nodes.len();
    let mut plan: Vec<ViewpointId> = nodes[1..].to_vec();
    plan.reverse();
    let mut visited = vec![start];
    let mut here = start;
    while here != goal && visited.len() < budget {
        let u: f64 = rng.gen();
        let pick: f64 = rng.gen();
        let planned = *plan.last().expect("plan reaches the goal");
        let detours: Vec<ViewpointId> = graph.neighbours(here).map(|(v, _)| v).filter(|&v| v != planned).collect();
        if u < p_wrong && !detours.is_empty() {
            here = detours[((pick * detours.len() as f64) as usize).min(detours.len() - 1)];
            let route = shortest_path(graph, here, goal)
                .map_err(|_| EvalError::Unreachable { x: graph.position(here).x, y: graph.position(here).y })?;
            plan = route.node_ids[1..].to_vec();
            plan.reverse();
        } else {
            here = plan.pop().expect("plan reaches the goal");
        }
        visited.push(here);
    }
    Ok(AgentRun {
        episode_id: episode_id.to_string(),
        visited: visited.iter().map(|&id| graph.position(id)).collect(),
        selected_object: trajectory.target_object,
    })
}
