//! Navigation metrics (TL, NE, SR, OSR, SPL, nDTW, GP, RGS, RGSPL) and
//! scripted followers that produce runs to evaluate.

mod agents;
mod metrics;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::envworld::{EnvError, Point2D};

pub use agents::{noisy_follower, oracle_follower};
pub use metrics::{aggregate, dtw, evaluate_run, results_table, EvalResult, Evaluator, RESULT_COLUMNS};

/// Stop radius for success, meters.
pub const DEFAULT_SUCCESS_RADIUS: f64 = 3.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("run has no positions")]
    EmptyRun,
    #[error("trajectory has no nodes")]
    EmptyTrajectory,
    #[error("trajectory references viewpoint {0} missing from the graph")]
    UnknownViewpoint(u32),
    #[error("position ({x}, {y}) cannot reach the goal")]
    Unreachable { x: f64, y: f64 },
    #[error("cannot aggregate an empty result set")]
    EmptyAggregate,
    #[error("success radius must be positive, got {0}")]
    InvalidRadius(f64),
    #[error("probability must lie in [0, 1], got {0}")]
    InvalidProbability(f64),
    #[error(transparent)]
    Env(#[from] EnvError),
}

/// Positions visited by an agent; the last one is where it stopped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentRun {
    pub episode_id: String,
    pub visited: Vec<Point2D>,
    /// Object the agent grounded, for object-goal episodes.
    pub selected_object: Option<u32>,
}

impl AgentRun {
    pub fn stop(&self) -> Option<Point2D> {
        self.visited.last().copied()
    }
}
