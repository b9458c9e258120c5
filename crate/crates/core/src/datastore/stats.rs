use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::graphbuild::GraphQualityReport;
use crate::trajsample::TrajectoryStyle;

use super::{read_shard, DataError, Episode};

/// Reference figures for the human-annotated R2R dataset.
pub const R2R_CALIBRATION: &str = "R2R: 22k instructions, 32 words avg, 7 nodes, 10 m";

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LengthSummary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GraphAggregate {
    pub scenes: usize,
    pub mean_density: f64,
    pub max_collision_ratio: f64,
    pub mean_edge_length: f64,
    pub mean_degree: f64,
    pub max_component_count: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub shards: usize,
    pub episodes: u64,
    pub by_style: BTreeMap<String, u64>,
    pub by_split: BTreeMap<String, u64>,
    pub node_histogram: BTreeMap<usize, u64>,
    /// Episodes per whole-meter length bucket.
    pub length_histogram: BTreeMap<u64, u64>,
    pub length: LengthSummary,
    pub mean_r2r_length: Option<f64>,
    pub mean_r2r_nodes: Option<f64>,
    pub mean_tokens: f64,
    pub per_scene: BTreeMap<String, u64>,
    pub graph: Option<GraphAggregate>,
}

/// Incremental statistics; feed episodes one at a time.
#[derive(Default)]
pub struct StatsAccumulator {
    stats: DatasetStats,
    length_sum: f64,
    token_sum: u64,
    r2r: (u64, f64, u64),
}

impl StatsAccumulator {
    pub fn add_shard(&mut self) {
        self.stats.shards += 1;
    }

    pub fn add(&mut self, e: &Episode) {
        let s = &mut self.stats;
        let t = &e.trajectory;
        if s.episodes == 0 {
            s.length.min = t.length;
            s.length.max = t.length;
        }
        s.episodes += 1;
        s.length.min = s.length.min.min(t.length);
        s.length.max = s.length.max.max(t.length);
        self.length_sum += t.length;
        self.token_sum += e.instruction.tokens.len() as u64;
        let style = match t.style {
            TrajectoryStyle::R2rStyle => "r2r_style",
            TrajectoryStyle::ReverieStyle => "reverie_style",
        };
        *s.by_style.entry(style.into()).or_default() += 1;
        *s.by_split.entry(e.split.as_str().into()).or_default() += 1;
        *s.node_histogram.entry(t.node_ids.len()).or_default() += 1;
        *s.length_histogram.entry(t.length.max(0.0).floor() as u64).or_default() += 1;
        *s.per_scene.entry(t.scene_id.clone()).or_default() += 1;
        if t.style == TrajectoryStyle::R2rStyle {
            self.r2r.0 += 1;
            self.r2r.1 += t.length;
            self.r2r.2 += t.node_ids.len() as u64;
        }
    }

    pub fn finish(mut self, reports: &[GraphQualityReport]) -> DatasetStats {
        let n = self.stats.episodes;
        if n > 0 {
            self.stats.length.mean = self.length_sum / n as f64;
            self.stats.mean_tokens = self.token_sum as f64 / n as f64;
        }
        if self.r2r.0 > 0 {
            self.stats.mean_r2r_length = Some(self.r2r.1 / self.r2r.0 as f64);
            self.stats.mean_r2r_nodes = Some(self.r2r.2 as f64 / self.r2r.0 as f64);
        }
        if !reports.is_empty() {
            let k = reports.len() as f64;
            self.stats.graph = Some(GraphAggregate {
                scenes: reports.len(),
                mean_density: reports.iter().map(|r| r.density).sum::<f64>() / k,
                max_collision_ratio: reports.iter().map(|r| r.collision_ratio).fold(0.0, f64::max),
                mean_edge_length: reports.iter().map(|r| r.mean_edge_length).sum::<f64>() / k,
                mean_degree: reports.iter().map(|r| r.mean_degree).sum::<f64>() / k,
                max_component_count: reports.iter().map(|r| r.component_count).max().unwrap_or(0),
            });
        }
        self.stats
    }
}

/// Statistics over the given shards, plus graph-quality aggregates when
/// reports are supplied.
pub fn dataset_stats(shards: &[impl AsRef<Path>], reports: &[GraphQualityReport]) -> Result<DatasetStats, DataError> {
    let mut acc = StatsAccumulator::default();
    for p in shards {
        let (_, episodes) =
            read_shard(p.as_ref()).map_err(|e| DataError::Shard(p.as_ref().display().to_string(), e))?;
        acc.add_shard();
        for e in &episodes {
            acc.add(e);
        }
    }
    Ok(acc.finish(reports))
}

pub fn stats_report(stats: &DatasetStats) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "shards\t{}", stats.shards);
    let _ = writeln!(s, "episodes\t{}", stats.episodes);
    for (k, v) in &stats.by_style {
        let _ = writeln!(s, "style.{k}\t{v}");
    }
    for (k, v) in &stats.by_split {
        let _ = writeln!(s, "split.{k}\t{v}");
    }
    for (k, v) in &stats.node_histogram {
        let _ = writeln!(s, "nodes.{k}\t{v}");
    }
    for (k, v) in &stats.length_histogram {
        let _ = writeln!(s, "length_m.{k}\t{v}");
    }
    let _ = writeln!(s, "length_m.min\t{:.2}", stats.length.min);
    let _ = writeln!(s, "length_m.mean\t{:.2}", stats.length.mean);
    let _ = writeln!(s, "length_m.max\t{:.2}", stats.length.max);
    let _ = writeln!(s, "tokens.mean\t{:.2}", stats.mean_tokens);
    for (k, v) in &stats.per_scene {
        let _ = writeln!(s, "scene.{k}\t{v}");
    }
    if let Some(g) = &stats.graph {
        let _ = writeln!(s, "graph.scenes\t{}", g.scenes);
        let _ = writeln!(s, "graph.density\t{:.3}", g.mean_density);
        let _ = writeln!(s, "graph.max_collision_ratio\t{:.4}", g.max_collision_ratio);
        let _ = writeln!(s, "graph.edge_length_m\t{:.3}", g.mean_edge_length);
        let _ = writeln!(s, "graph.degree\t{:.3}", g.mean_degree);
        let _ = writeln!(s, "graph.max_components\t{}", g.max_component_count);
    }
    match (stats.mean_r2r_nodes, stats.mean_r2r_length) {
        (Some(n), Some(l)) => {
            let _ = writeln!(
                s,
                "this dataset: {} instructions, {:.1} words avg, {:.2} nodes, {:.2} m",
                stats.episodes, stats.mean_tokens, n, l
            );
        }
        _ => {
            let _ = writeln!(s, "this dataset: no instruction routes");
        }
    }
    let _ = writeln!(s, "{R2R_CALIBRATION}");
    s
}
