use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::instructgen::InstructionRecord;
use crate::trajsample::{Trajectory, TrajectoryStyle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    ValSeen,
    ValUnseen,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::ValSeen, Split::ValUnseen];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::ValSeen => "val_seen",
            Split::ValUnseen => "val_unseen",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Split::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| format!("unknown split {s:?}; expected train, val_seen or val_unseen"))
    }
}

/// An instruction-trajectory pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Episode {
    /// 16 hex digits; see [`episode_id`].
    pub episode_id: String,
    pub split: Split,
    /// Seed the instruction was generated with.
    pub seed: u64,
    pub trajectory: Trajectory,
    pub instruction: InstructionRecord,
}

impl Episode {
    pub fn new(trajectory: Trajectory, instruction: InstructionRecord, seed: u64, split: Split) -> Self {
        let episode_id = episode_id(&trajectory, &instruction.speaker_tag, seed);
        Self { episode_id, split, seed, trajectory, instruction }
    }

    pub fn scene_id(&self) -> &str {
        &self.trajectory.scene_id
    }
}

fn style_tag(style: TrajectoryStyle) -> &'static str {
    match style {
        TrajectoryStyle::R2rStyle => "r2r_style",
        TrajectoryStyle::ReverieStyle => "reverie_style",
    }
}

/// First 8 bytes (hex) of SHA-256 over
/// `scene_id \n style \n n0,n1,... \n target|- \n speaker_tag \n seed`.
pub fn episode_id(trajectory: &Trajectory, speaker_tag: &str, seed: u64) -> String {
    let nodes: Vec<String> = trajectory.node_ids.iter().map(u32::to_string).collect();
    let target = trajectory.target_object.map_or_else(|| "-".to_string(), |t| t.to_string());
    let canonical = format!(
        "{}\n{}\n{}\n{}\n{}\n{}",
        trajectory.scene_id,
        style_tag(trajectory.style),
        nodes.join(","),
        target,
        speaker_tag,
        seed
    );
    hex::encode(&Sha256::digest(canonical.as_bytes())[..8])
}
