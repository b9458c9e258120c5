//! Fixtures shared by the benchmarks.

use vlngen_core::datastore::{build_scene, PipelineConfig};
use vlngen_core::{NavGraph, OccupancyGrid};

/// Scene `scene000` of the default config with root seed `seed`.
pub fn scene(seed: u64) -> (OccupancyGrid, NavGraph) {
    let cfg = PipelineConfig { seed, ..Default::default() };
    build_scene(&cfg, "scene000").expect("default scene builds")
}
