//! End-to-end dataset generation.
//!
//! Output layout:
//!
//! ```text
//! <out>/config.toml
//! <out>/manifest.json
//! <out>/scenes/<scene>.grid
//! <out>/scenes/<scene>.graph.json
//! <out>/scenes/<scene>.objects.json
//! <out>/shards/<scene>.<split>.shard
//! ```

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::envworld::{generate_floorplan, to_raster, OccupancyGrid};
use crate::graphbuild::{build_navigation_graph, graph_to_json, quality_report, GraphQualityReport, NavGraph};
use crate::instructgen::{InstructError, Speaker, SpeakerContext, TemplateSpeaker};
use crate::seed::derive_seed;
use crate::trajsample::{
    enumerate_r2r_pairs, object_paths, place_objects, ObjectAnnotation, PathIndex, Trajectory, TrajectoryStyle,
};

use super::{
    objects_to_json, split_scenes, DataError, Episode, ObjectFile, PipelineConfig, ScenePartition, ShardError,
    ShardWriter, Split,
};

pub const MANIFEST_FORMAT_VERSION: u32 = 1;

/// Seed of one scene's pipeline.
pub fn scene_seed(root: u64, scene_id: &str) -> u64 {
    derive_seed(root, &format!("scene/{scene_id}"))
}

/// Seed an instruction is generated with; depends only on the route, so it
/// does not change when a cap selects a different subset.
pub fn instruction_seed(scene_seed: u64, trajectory: &Trajectory) -> u64 {
    let style = match trajectory.style {
        TrajectoryStyle::R2rStyle => "r2r",
        TrajectoryStyle::ReverieStyle => "reverie",
    };
    let nodes: Vec<String> = trajectory.node_ids.iter().map(u32::to_string).collect();
    let target = trajectory.target_object.map_or_else(|| "-".to_string(), |t| t.to_string());
    derive_seed(scene_seed, &format!("instr/{style}/{}/{target}", nodes.join(",")))
}

/// Whether a seen-scene episode is held out for validation. Uses the episode
/// id as a uniform draw so the choice is stable under re-ordering.
pub fn is_val_seen(episode_id: &str, fraction: f64) -> bool {
    let v = u64::from_str_radix(episode_id, 16).unwrap_or(0);
    (v as f64) < fraction * 2f64.powi(64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SceneStatus {
    Ok,
    Failed,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SceneYields {
    pub r2r_candidates: u64,
    pub r2r: u64,
    pub objects: u64,
    pub eligible_objects: u64,
    pub reverie: u64,
    pub train: u64,
    pub val_seen: u64,
    pub val_unseen: u64,
}

impl SceneYields {
    pub fn episodes(&self) -> u64 {
        self.r2r + self.reverie
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneRecord {
    pub scene_id: String,
    pub unseen: bool,
    pub status: SceneStatus,
    pub error: Option<String>,
    pub quality: Option<GraphQualityReport>,
    pub yields: SceneYields,
    /// Paths relative to the output directory.
    pub shards: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub scenes_ok: usize,
    pub scenes_failed: usize,
    pub episodes: u64,
    pub r2r: u64,
    pub reverie: u64,
    pub train: u64,
    pub val_seen: u64,
    pub val_unseen: u64,
    /// Mean episodes over successful scenes.
    pub episodes_per_scene: f64,
    /// Largest number of episodes buffered at once by any scene.
    pub peak_episode_buffer: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SceneTimings {
    pub env_ms: f64,
    pub graph_ms: f64,
    pub episodes_ms: f64,
}

/// Wall-clock measurements; the only part of a manifest that varies between
/// identical runs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_ms: f64,
    pub scenes: BTreeMap<String, SceneTimings>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub config_digest: String,
    pub seed: u64,
    pub partition: ScenePartition,
    pub scenes: Vec<SceneRecord>,
    pub totals: Totals,
    pub timings: Timings,
}

impl Manifest {
    pub fn failed_scenes(&self) -> impl Iterator<Item = &SceneRecord> {
        self.scenes.iter().filter(|s| s.status == SceneStatus::Failed)
    }

    pub fn quality_reports(&self) -> Vec<GraphQualityReport> {
        self.scenes.iter().filter_map(|s| s.quality.clone()).collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, DataError> {
        let m: Manifest = serde_json::from_str(text).map_err(|e| DataError::Format(format!("manifest: {e}")))?;
        if m.format_version != MANIFEST_FORMAT_VERSION {
            return Err(DataError::Format(format!("unsupported manifest format_version {}", m.format_version)));
        }
        Ok(m)
    }
}

/// Fixed-capacity episode buffer that records its high-water mark.
pub struct EpisodeWindow {
    buf: Vec<Episode>,
    capacity: usize,
    peak: usize,
}

impl EpisodeWindow {
    pub fn new(capacity: usize) -> Self {
        Self { buf: Vec::with_capacity(capacity.min(1 << 16)), capacity: capacity.max(1), peak: 0 }
    }

    pub fn is_full(&self) -> bool {
        self.buf.len() >= self.capacity
    }

    pub fn push(&mut self, e: Episode) {
        debug_assert!(!self.is_full());
        self.buf.push(e);
        self.peak = self.peak.max(self.buf.len());
    }

    pub fn drain(&mut self) -> std::vec::Drain<'_, Episode> {
        self.buf.drain(..)
    }

    pub fn peak(&self) -> usize {
        self.peak
    }
}

struct SceneWriters {
    writers: Vec<(Split, PathBuf, ShardWriter)>,
}

impl SceneWriters {
    fn write(&mut self, e: &Episode) -> Result<(), ShardError> {
        let w = self.writers.iter_mut().find(|(s, _, _)| *s == e.split).expect("writer exists for split");
        w.2.write(e)
    }
}

struct SceneOutput {
    record: SceneRecord,
    timings: SceneTimings,
    ids: Vec<u64>,
    peak: usize,
}

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Builds the grid and graph of one scene.
pub fn build_scene(cfg: &PipelineConfig, scene_id: &str) -> Result<(OccupancyGrid, NavGraph), DataError> {
    let seed = scene_seed(cfg.seed, scene_id);
    let grid = generate_floorplan(&cfg.floorplan_spec(scene_id, derive_seed(seed, "env")))?;
    let scene = build_navigation_graph(&grid, &cfg.graph_params(), derive_seed(seed, "graph"))?;
    Ok((grid, scene.graph))
}

/// Places the scene's objects.
pub fn scene_objects(cfg: &PipelineConfig, grid: &OccupancyGrid, graph: &NavGraph) -> Vec<ObjectAnnotation> {
    let t = &cfg.trajectories;
    let seed = derive_seed(scene_seed(cfg.seed, grid.scene_id()), "objects");
    place_objects(grid, graph, t.objects_per_scene, t.max_object_distance, seed)
}

/// Streams every episode of one scene to `sink`, in canonical order: instruction
/// routes by (start, goal), then object routes by object and start.
pub fn scene_episodes(
    cfg: &PipelineConfig,
    graph: &NavGraph,
    objects: &[ObjectAnnotation],
    unseen: bool,
    mut sink: impl FnMut(Episode) -> Result<(), DataError>,
) -> Result<SceneYields, DataError> {
    let t = &cfg.trajectories;
    let seed = scene_seed(cfg.seed, graph.scene_id());
    let index = PathIndex::new(graph);
    let speaker = TemplateSpeaker { bands: cfg.instructions.bands() };
    let ctx = SpeakerContext { graph, objects };
    let mut yields = SceneYields {
        objects: objects.len() as u64,
        eligible_objects: objects.iter().filter(|o| o.eligible).count() as u64,
        ..Default::default()
    };

    let mut emit = |traj: Trajectory, yields: &mut SceneYields| -> Result<(), DataError> {
        let iseed = instruction_seed(seed, &traj);
        let instruction =
            speaker.speak(&ctx, &traj, iseed).map_err(|e: InstructError| DataError::Scene(e.to_string()))?;
        let mut e = Episode::new(traj, instruction, iseed, Split::Train);
        e.split = if unseen {
            Split::ValUnseen
        } else if is_val_seen(&e.episode_id, cfg.dataset.val_seen_fraction) {
            Split::ValSeen
        } else {
            Split::Train
        };
        match e.split {
            Split::Train => yields.train += 1,
            Split::ValSeen => yields.val_seen += 1,
            Split::ValUnseen => yields.val_unseen += 1,
        }
        sink(e)
    };

    let plan =
        enumerate_r2r_pairs(&index, t.min_intermediate, t.max_intermediate, t.scene_cap(), derive_seed(seed, "r2r"));
    yields.r2r_candidates = plan.total_candidates as u64;
    for traj in plan.trajectories(&index) {
        yields.r2r += 1;
        emit(traj, &mut yields)?;
    }
    let object_seed = derive_seed(seed, "reverie");
    for obj in objects {
        for traj in object_paths(&index, obj, t.min_object_edges, t.max_object_edges, t.object_cap(), object_seed) {
            yields.reverie += 1;
            emit(traj, &mut yields)?;
        }
    }
    Ok(yields)
}

fn run_scene(cfg: &PipelineConfig, digest: &str, out: &Path, scene_id: &str, unseen: bool) -> SceneOutput {
    let mut timings = SceneTimings::default();
    let mut record = SceneRecord {
        scene_id: scene_id.to_string(),
        unseen,
        status: SceneStatus::Ok,
        error: None,
        quality: None,
        yields: SceneYields::default(),
        shards: Vec::new(),
    };
    let mut ids = Vec::new();
    let mut peak = 0;
    let result = (|| -> Result<(), DataError> {
        let seed = scene_seed(cfg.seed, scene_id);
        let started = Instant::now();
        let grid = generate_floorplan(&cfg.floorplan_spec(scene_id, derive_seed(seed, "env")))?;
        timings.env_ms = ms_since(started);

        let started = Instant::now();
        let scene = build_navigation_graph(&grid, &cfg.graph_params(), derive_seed(seed, "graph"))?;
        let graph = scene.graph;
        record.quality = Some(quality_report(&graph, &grid, cfg.env.clearance));
        timings.graph_ms = ms_since(started);

        let started = Instant::now();
        let scenes = out.join("scenes");
        fs::write(scenes.join(format!("{scene_id}.grid")), to_raster(&grid))?;
        fs::write(scenes.join(format!("{scene_id}.graph.json")), graph_to_json(&graph))?;
        let objects = scene_objects(cfg, &grid, &graph);
        fs::write(
            scenes.join(format!("{scene_id}.objects.json")),
            objects_to_json(&ObjectFile::new(scene_id, objects.clone())),
        )?;

        let splits: &[Split] = if unseen { &[Split::ValUnseen] } else { &[Split::Train, Split::ValSeen] };
        let mut writers = SceneWriters { writers: Vec::new() };
        for &split in splits {
            let rel = format!("shards/{scene_id}.{split}.shard");
            let w = ShardWriter::create(out.join(&rel), digest, cfg.seed, vec![scene_id.to_string()], split)
                .map_err(|e| DataError::Shard(rel.clone(), e))?;
            writers.writers.push((split, PathBuf::from(&rel), w));
        }

        let mut window = EpisodeWindow::new(cfg.dataset.episode_window);
        let flush = |window: &mut EpisodeWindow, writers: &mut SceneWriters| -> Result<(), DataError> {
            for e in window.drain() {
                writers.write(&e).map_err(|err| DataError::Shard(scene_id.to_string(), err))?;
            }
            Ok(())
        };
        let yields = scene_episodes(cfg, &graph, &objects, unseen, |e| {
            ids.push(u64::from_str_radix(&e.episode_id, 16).expect("hex id"));
            window.push(e);
            if window.is_full() {
                flush(&mut window, &mut writers)?;
            }
            Ok(())
        })?;
        flush(&mut window, &mut writers)?;
        peak = window.peak();
        for (_, rel, w) in writers.writers {
            w.finish().map_err(|e| DataError::Shard(rel.display().to_string(), e))?;
            record.shards.push(rel.display().to_string());
        }
        record.yields = yields;
        timings.episodes_ms = ms_since(started);
        Ok(())
    })();
    if let Err(e) = result {
        record.status = SceneStatus::Failed;
        record.error = Some(e.to_string());
        record.yields = SceneYields::default();
        for split in Split::ALL {
            let base = out.join(format!("shards/{scene_id}.{split}.shard"));
            let _ = fs::remove_file(&base);
            let mut part = base.into_os_string();
            part.push(".part");
            let _ = fs::remove_file(part);
        }
        record.shards.clear();
        ids.clear();
    }
    SceneOutput { record, timings, ids, peak }
}

/// Runs every scene of `cfg` into `out`, writing shards, scene files and the
/// manifest. Scene failures are recorded in the manifest; only setup and
/// manifest I/O errors abort the run.
pub fn pipeline_run(cfg: &PipelineConfig, out: &Path) -> Result<Manifest, DataError> {
    cfg.validate()?;
    let started = Instant::now();
    fs::create_dir_all(out.join("scenes"))?;
    fs::create_dir_all(out.join("shards"))?;
    fs::write(out.join("config.toml"), cfg.to_toml())?;
    let digest = cfg.digest();
    let scene_ids = cfg.scene_ids();
    let partition = split_scenes(&scene_ids, cfg.dataset.ratio_unseen, derive_seed(cfg.seed, "split"))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.dataset.workers)
        .build()
        .map_err(|e| DataError::Scene(format!("worker pool: {e}")))?;
    let outputs: Vec<SceneOutput> = pool
        .install(|| scene_ids.par_iter().map(|id| run_scene(cfg, &digest, out, id, partition.is_unseen(id))).collect());

    let mut seen_ids = HashSet::new();
    let mut totals = Totals::default();
    let mut timings = Timings::default();
    let mut scenes = Vec::with_capacity(outputs.len());
    for o in outputs {
        for id in &o.ids {
            if !seen_ids.insert(*id) {
                return Err(DataError::IdCollision(format!("{id:016x}")));
            }
        }
        let y = &o.record.yields;
        match o.record.status {
            SceneStatus::Ok => totals.scenes_ok += 1,
            SceneStatus::Failed => totals.scenes_failed += 1,
        }
        totals.episodes += y.episodes();
        totals.r2r += y.r2r;
        totals.reverie += y.reverie;
        totals.train += y.train;
        totals.val_seen += y.val_seen;
        totals.val_unseen += y.val_unseen;
        totals.peak_episode_buffer = totals.peak_episode_buffer.max(o.peak);
        timings.scenes.insert(o.record.scene_id.clone(), o.timings);
        scenes.push(o.record);
    }
    if totals.scenes_ok > 0 {
        totals.episodes_per_scene = totals.episodes as f64 / totals.scenes_ok as f64;
    }
    timings.total_ms = ms_since(started);
    let manifest = Manifest {
        format_version: MANIFEST_FORMAT_VERSION,
        config_digest: digest,
        seed: cfg.seed,
        partition,
        scenes,
        totals,
        timings,
    };
    fs::write(out.join("manifest.json"), manifest.to_json())?;
    Ok(manifest)
}
