//! Large-scale navigation-data generation over synthetic indoor scenes.
//!
//! The pipeline mirrors how instruction-following navigation datasets are
//! scaled up: sample dense viewpoints over the open floor, cluster them,
//! connect them into a fully-traversable navigation graph, enumerate
//! shortest-route trajectories, pair each with an instruction, and write
//! the episodes to deterministic shards. A metric suite scores agent runs
//! against those episodes.

pub mod datastore;
pub mod envworld;
pub mod graphbuild;
pub mod instructgen;
pub mod naveval;
pub mod seed;
pub mod trajsample;

pub use datastore::{Episode, Manifest, PipelineConfig, Split};
pub use envworld::{Cell, OccupancyGrid, Point2D};
pub use graphbuild::{GraphQualityReport, NavEdge, NavGraph, Viewpoint, ViewpointId};
pub use instructgen::{BleuScore, InstructionRecord};
pub use naveval::{AgentRun, EvalResult};
pub use trajsample::{ObjectAnnotation, Trajectory, TrajectoryStyle};
