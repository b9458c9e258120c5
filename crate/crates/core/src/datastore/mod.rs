//! Dataset persistence and orchestration: pipeline configuration, episode
//! records, checksummed shards, scene splits, statistics, SVG rendering and
//! the end-to-end pipeline.

mod config;
mod episode;
mod files;
mod pipeline;
mod render;
mod shard;
mod split;
mod stats;

use thiserror::Error;

use crate::envworld::EnvError;
use crate::graphbuild::GraphError;

pub use config::{
    ConfigError, DatasetConfig, EnvConfig, EvaluationConfig, GraphConfig, InstructionConfig, PipelineConfig,
    TrajectoryConfig, CONFIG_FORMAT_VERSION,
};
pub use episode::{episode_id, Episode, Split};
pub use files::{
    objects_from_json, objects_to_json, runs_from_text, runs_to_text, trajectories_from_json, trajectories_to_json,
    ObjectFile, TrajectoryFile, OBJECTS_FORMAT_VERSION, RUNS_FORMAT_VERSION, TRAJECTORIES_FORMAT_VERSION,
};
pub use pipeline::{
    build_scene, instruction_seed, is_val_seen, pipeline_run, scene_episodes, scene_objects, scene_seed, EpisodeWindow,
    Manifest, SceneRecord, SceneStatus, SceneTimings, SceneYields, Timings, Totals, MANIFEST_FORMAT_VERSION,
};
pub use render::render_svg;
pub use shard::{parse_shard, read_shard, write_shard, ShardError, ShardHeader, ShardWriter, SHARD_FORMAT_VERSION};
pub use split::{split_scenes, ScenePartition};
pub use stats::{
    dataset_stats, stats_report, DatasetStats, GraphAggregate, LengthSummary, StatsAccumulator, R2R_CALIBRATION,
};

#[derive(Debug, Error)]
pub enum DataError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("shard {0}: {1}")]
    Shard(String, ShardError),
    #[error("format error: {0}")]
    Format(String),
    #[error("split error: {0}")]
    Split(String),
    #[error("episode id collision: {0}")]
    IdCollision(String),
    #[error("scene failed: {0}")]
    Scene(String),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
