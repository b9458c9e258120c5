//! Pipeline configuration: a TOML file with one table per stage. Every key
//! is optional and falls back to its default.
//!
//! ```toml
//! seed = 1
//! scene_count = 20
//!
//! [env]
//! width_m = 16.0
//! height_m = 10.0
//!
//! [trajectories]
//! per_scene_cap = 50000   # 0 disables the cap
//! ```

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::envworld::{FloorplanSpec, DEFAULT_CLEARANCE, DEFAULT_MIN_GEO_SEP, DEFAULT_RESOLUTION};
use crate::graphbuild::{GraphParams, Linkage, DEFAULT_CLUSTER_THRESHOLD, DEFAULT_MAX_DEGREE, DEFAULT_MAX_EDGE};
use crate::instructgen::TurnBands;
use crate::naveval::DEFAULT_SUCCESS_RADIUS;
use crate::trajsample::{
    DEFAULT_MAX_INTERMEDIATE, DEFAULT_MAX_OBJECT_DISTANCE, DEFAULT_MAX_OBJECT_EDGES, DEFAULT_MIN_INTERMEDIATE,
    DEFAULT_MIN_OBJECT_EDGES, DEFAULT_PER_OBJECT_CAP, DEFAULT_PER_SCENE_CAP,
};

pub const CONFIG_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config field `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error("unsupported config format_version {0}")]
    Version(u32),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvConfig {
    pub width_m: f64,
    pub height_m: f64,
    pub resolution: f64,
    pub min_rooms: usize,
    pub max_rooms: usize,
    pub min_corridor_width: f64,
    pub max_corridor_width: f64,
    pub obstacle_density: f64,
    pub clearance: f64,
}

impl Default for EnvConfig {
    fn default() -> Self {
        let f = FloorplanSpec::default();
        Self {
            width_m: f.width_m,
            height_m: f.height_m,
            resolution: DEFAULT_RESOLUTION,
            min_rooms: f.min_rooms,
            max_rooms: f.max_rooms,
            min_corridor_width: f.min_corridor_width,
            max_corridor_width: f.max_corridor_width,
            obstacle_density: f.obstacle_density,
            clearance: DEFAULT_CLEARANCE,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphConfig {
    pub min_geo_sep: f64,
    pub cluster_threshold: f64,
    pub linkage: Linkage,
    pub max_edge: f64,
    pub max_degree: usize,
}

impl Default for GraphConfig {
    fn default() -> Self {
        Self {
            min_geo_sep: DEFAULT_MIN_GEO_SEP,
            cluster_threshold: DEFAULT_CLUSTER_THRESHOLD,
            linkage: Linkage::default(),
            max_edge: DEFAULT_MAX_EDGE,
            max_degree: DEFAULT_MAX_DEGREE,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrajectoryConfig {
    pub min_intermediate: usize,
    pub max_intermediate: usize,
    /// 0 disables the cap.
    pub per_scene_cap: usize,
    pub objects_per_scene: usize,
    pub max_object_distance: f64,
    pub min_object_edges: usize,
    pub max_object_edges: usize,
    /// 0 disables the cap.
    pub per_object_cap: usize,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        Self {
            min_intermediate: DEFAULT_MIN_INTERMEDIATE,
            max_intermediate: DEFAULT_MAX_INTERMEDIATE,
            per_scene_cap: DEFAULT_PER_SCENE_CAP,
            objects_per_scene: 12,
            max_object_distance: DEFAULT_MAX_OBJECT_DISTANCE,
            min_object_edges: DEFAULT_MIN_OBJECT_EDGES,
            max_object_edges: DEFAULT_MAX_OBJECT_EDGES,
            per_object_cap: DEFAULT_PER_OBJECT_CAP,
        }
    }
}

impl TrajectoryConfig {
    pub fn scene_cap(&self) -> Option<usize> {
        (self.per_scene_cap > 0).then_some(self.per_scene_cap)
    }

    pub fn object_cap(&self) -> Option<usize> {
        (self.per_object_cap > 0).then_some(self.per_object_cap)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InstructionConfig {
    pub straight_max_deg: f64,
    pub around_min_deg: f64,
}

impl Default for InstructionConfig {
    fn default() -> Self {
        let b = TurnBands::default();
        Self { straight_max_deg: b.straight_max, around_min_deg: b.around_min }
    }
}

impl InstructionConfig {
    pub fn bands(&self) -> TurnBands {
        TurnBands { straight_max: self.straight_max_deg, around_min: self.around_min_deg }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationConfig {
    pub success_radius: f64,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        Self { success_radius: DEFAULT_SUCCESS_RADIUS }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    /// Fraction of scenes held out as unseen.
    pub ratio_unseen: f64,
    /// Fraction of episodes in seen scenes held out as val_seen.
    pub val_seen_fraction: f64,
    /// Episodes buffered per scene before they are flushed to shards.
    pub episode_window: usize,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self { ratio_unseen: 0.2, val_seen_fraction: 0.05, episode_window: 4096, workers: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub format_version: u32,
    pub seed: u64,
    pub scene_count: usize,
    pub scene_prefix: String,
    pub env: EnvConfig,
    pub graph: GraphConfig,
    pub trajectories: TrajectoryConfig,
    pub instructions: InstructionConfig,
    pub evaluation: EvaluationConfig,
    pub dataset: DatasetConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            format_version: CONFIG_FORMAT_VERSION,
            seed: 0,
            scene_count: 20,
            scene_prefix: "scene".into(),
            env: EnvConfig::default(),
            graph: GraphConfig::default(),
            trajectories: TrajectoryConfig::default(),
            instructions: InstructionConfig::default(),
            evaluation: EvaluationConfig::default(),
            dataset: DatasetConfig::default(),
        }
    }
}

fn check(ok: bool, field: &'static str, reason: impl FnOnce() -> String) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::Invalid { field, reason: reason() })
    }
}

fn positive(v: f64, field: &'static str) -> Result<(), ConfigError> {
    check(v.is_finite() && v > 0.0, field, || format!("must be positive, got {v}"))
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.format_version != CONFIG_FORMAT_VERSION {
            return Err(ConfigError::Version(self.format_version));
        }
        check(self.scene_count > 0, "scene_count", || "must be at least 1".into())?;
        check(
            !self.scene_prefix.is_empty()
                && self.scene_prefix.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-'),
            "scene_prefix",
            || format!("must be non-empty [A-Za-z0-9_-], got {:?}", self.scene_prefix),
        )?;
        let e = &self.env;
        positive(e.width_m, "env.width_m")?;
        positive(e.height_m, "env.height_m")?;
        positive(e.resolution, "env.resolution")?;
        positive(e.clearance, "env.clearance")?;
        check(e.min_rooms <= e.max_rooms, "env.min_rooms", || "must not exceed max_rooms".into())?;
        check(e.min_corridor_width <= e.max_corridor_width, "env.min_corridor_width", || {
            "must not exceed max_corridor_width".into()
        })?;
        check((0.0..0.9).contains(&e.obstacle_density), "env.obstacle_density", || {
            format!("must lie in [0, 0.9), got {}", e.obstacle_density)
        })?;
        let g = &self.graph;
        positive(g.min_geo_sep, "graph.min_geo_sep")?;
        positive(g.cluster_threshold, "graph.cluster_threshold")?;
        positive(g.max_edge, "graph.max_edge")?;
        check(g.max_degree >= 1, "graph.max_degree", || "must be at least 1".into())?;
        let t = &self.trajectories;
        check(t.min_intermediate <= t.max_intermediate, "trajectories.min_intermediate", || {
            "must not exceed max_intermediate".into()
        })?;
        check(
            t.min_object_edges >= 1 && t.min_object_edges <= t.max_object_edges,
            "trajectories.min_object_edges",
            || "must lie in [1, max_object_edges]".into(),
        )?;
        positive(t.max_object_distance, "trajectories.max_object_distance")?;
        self.instructions
            .bands()
            .validate()
            .map_err(|err| ConfigError::Invalid { field: "instructions", reason: err.to_string() })?;
        positive(self.evaluation.success_radius, "evaluation.success_radius")?;
        let d = &self.dataset;
        check(d.ratio_unseen > 0.0 && d.ratio_unseen < 1.0, "dataset.ratio_unseen", || {
            format!("must lie in (0, 1), got {}", d.ratio_unseen)
        })?;
        check((0.0..1.0).contains(&d.val_seen_fraction), "dataset.val_seen_fraction", || {
            format!("must lie in [0, 1), got {}", d.val_seen_fraction)
        })?;
        check(d.episode_window > 0, "dataset.episode_window", || "must be at least 1".into())?;
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON rendering (fixed field order,
    /// shortest round-trip float formatting).
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn scene_ids(&self) -> Vec<String> {
        (0..self.scene_count).map(|i| format!("{}{:03}", self.scene_prefix, i)).collect()
    }

    pub fn floorplan_spec(&self, scene_id: &str, seed: u64) -> FloorplanSpec {
        let e = &self.env;
        FloorplanSpec {
            scene_id: scene_id.to_string(),
            width_m: e.width_m,
            height_m: e.height_m,
            resolution: e.resolution,
            min_rooms: e.min_rooms,
            max_rooms: e.max_rooms,
            min_corridor_width: e.min_corridor_width,
            max_corridor_width: e.max_corridor_width,
            obstacle_density: e.obstacle_density,
            clearance: e.clearance,
            seed,
        }
    }

    pub fn graph_params(&self) -> GraphParams {
        let g = &self.graph;
        GraphParams {
            clearance: self.env.clearance,
            min_geo_sep: g.min_geo_sep,
            cluster_threshold: g.cluster_threshold,
            linkage: g.linkage,
            max_edge: g.max_edge,
            max_degree: g.max_degree,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_default() {
        assert_eq!(PipelineConfig::from_toml("").unwrap(), PipelineConfig::default());
    }

    #[test]
    fn round_trip_and_digest() {
        let mut cfg = PipelineConfig { seed: 9, ..Default::default() };
        cfg.graph.linkage = Linkage::Average;
        let back = PipelineConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.digest(), cfg.digest());
        assert_eq!(cfg.digest().len(), 64);
        assert_ne!(cfg.digest(), PipelineConfig::default().digest());
    }

    #[test]
    fn partial_tables() {
        let cfg =
            PipelineConfig::from_toml("seed = 3\n[env]\nwidth_m = 20.0\n[trajectories]\nper_scene_cap = 0\n").unwrap();
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.env.width_m, 20.0);
        assert_eq!(cfg.env.height_m, 10.0);
        assert_eq!(cfg.trajectories.scene_cap(), None);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(matches!(PipelineConfig::from_toml("bogus = 1"), Err(ConfigError::Parse(_))));
        assert!(matches!(PipelineConfig::from_toml("format_version = 2"), Err(ConfigError::Version(2))));
        assert!(matches!(
            PipelineConfig::from_toml("[dataset]\nratio_unseen = 1.0"),
            Err(ConfigError::Invalid { field: "dataset.ratio_unseen", .. })
        ));
        assert!(matches!(
            PipelineConfig::from_toml("[env]\nresolution = -0.1"),
            Err(ConfigError::Invalid { field: "env.resolution", .. })
        ));
        assert!(matches!(
            PipelineConfig::from_toml("[instructions]\nstraight_max_deg = 150.0"),
            Err(ConfigError::Invalid { field: "instructions", .. })
        ));
    }

    #[test]
    fn scene_ids_are_padded() {
        let cfg = PipelineConfig { scene_count: 3, ..Default::default() };
        assert_eq!(cfg.scene_ids(), vec!["scene000", "scene001", "scene002"]);
    }
}
