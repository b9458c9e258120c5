use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::seed::stage_rng;

use super::DataError;

/// Scene-level partition; both sides sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenePartition {
    pub seen: Vec<String>,
    pub unseen: Vec<String>,
}

impl ScenePartition {
    pub fn is_unseen(&self, scene_id: &str) -> bool {
        self.unseen.binary_search_by(|s| s.as_str().cmp(scene_id)).is_ok()
    }
}

/// Holds out `round(n × ratio_unseen)` scenes (at least one, at most n − 1)
/// chosen by a seeded shuffle.
pub fn split_scenes(scene_ids: &[String], ratio_unseen: f64, seed: u64) -> Result<ScenePartition, DataError> {
    if scene_ids.len() < 2 {
        return Err(DataError::Split(format!("need at least 2 scenes for an unseen split, got {}", scene_ids.len())));
    }
    if !(ratio_unseen > 0.0 && ratio_unseen < 1.0) {
        return Err(DataError::Split(format!("ratio_unseen must lie in (0, 1), got {ratio_unseen}")));
    }
    let mut ids = scene_ids.to_vec();
    ids.sort();
    ids.dedup();
    if ids.len() != scene_ids.len() {
        return Err(DataError::Split("duplicate scene ids".into()));
    }
    let n = ids.len();
    let k = ((n as f64 * ratio_unseen).round() as usize).clamp(1, n - 1);
    ids.shuffle(&mut stage_rng(seed, "split"));
    let mut unseen = ids.split_off(n - k);
    ids.sort();
    unseen.sort();
    Ok(ScenePartition { seen: ids, unseen })
}
