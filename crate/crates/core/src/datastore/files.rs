//! Versioned side files: object annotations, trajectory lists and agent runs.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::naveval::AgentRun;
use crate::trajsample::{ObjectAnnotation, Trajectory};

use super::DataError;

pub const OBJECTS_FORMAT_VERSION: u32 = 1;
pub const TRAJECTORIES_FORMAT_VERSION: u32 = 1;
pub const RUNS_FORMAT_VERSION: u32 = 1;
const RUNS_MAGIC: &str = "VLNRUNS";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectFile {
    pub format_version: u32,
    pub scene_id: String,
    pub objects: Vec<ObjectAnnotation>,
}

impl ObjectFile {
    pub fn new(scene_id: &str, objects: Vec<ObjectAnnotation>) -> Self {
        Self { format_version: OBJECTS_FORMAT_VERSION, scene_id: scene_id.to_string(), objects }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryFile {
    pub format_version: u32,
    pub scene_id: String,
    pub trajectories: Vec<Trajectory>,
}

impl TrajectoryFile {
    pub fn new(scene_id: &str, trajectories: Vec<Trajectory>) -> Self {
        Self { format_version: TRAJECTORIES_FORMAT_VERSION, scene_id: scene_id.to_string(), trajectories }
    }
}

trait Versioned {
    const VERSION: u32;
    const KIND: &'static str;
    fn version(&self) -> u32;
}

impl Versioned for ObjectFile {
    const VERSION: u32 = OBJECTS_FORMAT_VERSION;
    const KIND: &'static str = "objects";
    fn version(&self) -> u32 {
        self.format_version
    }
}

impl Versioned for TrajectoryFile {
    const VERSION: u32 = TRAJECTORIES_FORMAT_VERSION;
    const KIND: &'static str = "trajectories";
    fn version(&self) -> u32 {
        self.format_version
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn from_json<T: DeserializeOwned + Versioned>(text: &str) -> Result<T, DataError> {
    let v: T = serde_json::from_str(text).map_err(|e| DataError::Format(format!("{} file: {e}", T::KIND)))?;
    if v.version() != T::VERSION {
        return Err(DataError::Format(format!(
            "{} file format_version {} is not supported (expected {})",
            T::KIND,
            v.version(),
            T::VERSION
        )));
    }
    Ok(v)
}

pub fn objects_to_json(file: &ObjectFile) -> String {
    to_json(file)
}

pub fn objects_from_json(text: &str) -> Result<ObjectFile, DataError> {
    from_json(text)
}

pub fn trajectories_to_json(file: &TrajectoryFile) -> String {
    to_json(file)
}

pub fn trajectories_from_json(text: &str) -> Result<TrajectoryFile, DataError> {
    from_json(text)
}

/// `VLNRUNS 1` followed by one JSON run per line.
pub fn runs_to_text(runs: &[AgentRun]) -> String {
    let mut s = format!("{RUNS_MAGIC} {RUNS_FORMAT_VERSION}\n");
    for r in runs {
        s.push_str(&serde_json::to_string(r).expect("serializable"));
        s.push('\n');
    }
    s
}

pub fn runs_from_text(text: &str) -> Result<Vec<AgentRun>, DataError> {
    let mut lines = text.lines();
    let first = lines.next().unwrap_or_default();
    if first != format!("{RUNS_MAGIC} {RUNS_FORMAT_VERSION}") {
        return Err(DataError::Format(format!(
            "runs file must start with `{RUNS_MAGIC} {RUNS_FORMAT_VERSION}`, found {first:?}"
        )));
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| DataError::Format(format!("runs file line {}: {e}", i + 2))))
        .collect()
}
