//! Template speaker: one clause per heading change along the route.
//!
//! Every turn clause contains exactly one direction word (`straight`, `left`,
//! `right`, `around`) and no other clause contains any, so the direction
//! words of an instruction can be checked against the route geometry.

use rand::seq::SliceRandom;

use crate::envworld::Point2D;
use crate::graphbuild::NavGraph;
use crate::seed::{derive_seed, rng_from_seed, StageRng};
use crate::trajsample::{ObjectAnnotation, Trajectory};

use super::{InstructError, InstructionRecord};

pub const TEMPLATE_SPEAKER_TAG: &str = "template-v1";
pub const MIN_TOKENS: usize = 8;
pub const MAX_TOKENS: usize = 60;
pub const DIRECTION_TOKENS: [&str; 4] = ["straight", "left", "right", "around"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TurnClass {
    Straight,
    Left,
    Right,
    Around,
}

impl TurnClass {
    pub fn token(self) -> &'static str {
        match self {
            TurnClass::Straight => "straight",
            TurnClass::Left => "left",
            TurnClass::Right => "right",
            TurnClass::Around => "around",
        }
    }
}

/// Heading-change thresholds in degrees.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TurnBands {
    /// `|Δ| <= straight_max` is straight.
    pub straight_max: f64,
    /// `|Δ| > around_min` is a turn around.
    pub around_min: f64,
}

impl Default for TurnBands {
    fn default() -> Self {
        Self { straight_max: 30.0, around_min: 135.0 }
    }
}

impl TurnBands {
    pub fn validate(&self) -> Result<(), InstructError> {
        if !(0.0 <= self.straight_max && self.straight_max < self.around_min && self.around_min <= 180.0) {
            return Err(InstructError::InvalidBands(format!(
                "need 0 <= straight_max < around_min <= 180, got {} and {}",
                self.straight_max, self.around_min
            )));
        }
        Ok(())
    }

    pub fn classify(&self, delta_deg: f64) -> TurnClass {
        let mag = delta_deg.abs();
        if mag <= self.straight_max {
            TurnClass::Straight
        } else if mag > self.around_min {
            TurnClass::Around
        } else if delta_deg > 0.0 {
            TurnClass::Left
        } else {
            TurnClass::Right
        }
    }
}

fn bearing(a: Point2D, b: Point2D) -> f64 {
    (b.y - a.y).atan2(b.x - a.x)
}

/// Signed heading change in degrees, in `(-180, 180]`. Counter-clockwise is
/// positive.
fn heading_change(a: Point2D, b: Point2D, c: Point2D) -> f64 {
    let mut d = (bearing(b, c) - bearing(a, b)).to_degrees();
    while d <= -180.0 {
        d += 360.0;
    }
    while d > 180.0 {
        d -= 360.0;
    }
    d
}

/// Turn class at every interior vertex of a polyline.
pub fn classify_turns(points: &[Point2D], bands: &TurnBands) -> Vec<TurnClass> {
    points.windows(3).map(|w| bands.classify(heading_change(w[0], w[1], w[2]))).collect()
}

/// Scene data a speaker may draw on.
#[derive(Clone, Copy, Debug)]
pub struct SpeakerContext<'a> {
    pub graph: &'a NavGraph,
    pub objects: &'a [ObjectAnnotation],
}

pub trait Speaker: Sync {
    fn tag(&self) -> &str;
    fn speak(
        &self,
        ctx: &SpeakerContext<'_>,
        trajectory: &Trajectory,
        seed: u64,
    ) -> Result<InstructionRecord, InstructError>;
}

#[derive(Clone, Debug, Default)]
pub struct TemplateSpeaker {
    pub bands: TurnBands,
}

const OPENERS: &[&str] = &[
    "walk forward from where you are",
    "begin by moving ahead",
    "head forward from your starting point",
    "start by walking ahead",
    "move forward from here",
];
const OBJECT_OPENERS: &[&str] = &[
    "begin next to the {} and walk ahead",
    "starting beside the {} move forward",
    "leave the {} behind and walk on",
    "from the {} head forward",
];
const CONNECTIVES: &[&str] = &["then", "and", "next", "after that", "now"];
const STRAIGHT: &[&str] = &["go straight", "continue straight", "keep going straight", "walk straight ahead"];
const LEFT: &[&str] = &["turn left", "take a left", "make a left", "veer left"];
const RIGHT: &[&str] = &["turn right", "take a right", "make a right", "veer right"];
const AROUND: &[&str] = &["turn around", "spin around", "swing around"];
const CLOSERS: &[&str] = &[
    "and stop once you arrive",
    "then wait at that spot",
    "and halt at the final spot",
    "and stop at the end of the path",
];
const OBJECT_CLOSERS: &[&str] =
    &["and stop next to the {}", "then wait beside the {}", "and halt once you reach the {}", "and stop by the {}"];

fn clause_options(turn: TurnClass) -> &'static [&'static str] {
    match turn {
        TurnClass::Straight => STRAIGHT,
        TurnClass::Left => LEFT,
        TurnClass::Right => RIGHT,
        TurnClass::Around => AROUND,
    }
}

fn words(phrase: &str, label: Option<&str>) -> Vec<String> {
    let filled = match label {
        Some(l) => phrase.replace("{}", l),
        None => phrase.to_string(),
    };
    filled.split_whitespace().map(str::to_string).collect()
}

/// Eligible object anchored at `node`, smallest id first.
fn object_at(objects: &[ObjectAnnotation], node: u32) -> Option<&ObjectAnnotation> {
    objects.iter().filter(|o| o.eligible && o.anchor_viewpoint == node).min_by_key(|o| o.object_id)
}

impl TemplateSpeaker {
    fn compose(
        &self,
        turns: &[TurnClass],
        start_label: Option<&str>,
        goal_label: Option<&str>,
        rng: Option<&mut StageRng>,
    ) -> Vec<String> {
        // Without an rng every choice takes the shortest phrasing.
        let mut rng = rng;
        let mut pick = |opts: &'static [&'static str]| -> &'static str {
            match rng.as_deref_mut() {
                Some(r) => opts.choose(r).expect("non-empty"),
                None => opts.iter().min_by_key(|s| s.split_whitespace().count()).expect("non-empty"),
            }
        };
        let mut tokens = match start_label {
            Some(l) => words(pick(OBJECT_OPENERS), Some(l)),
            None => words(pick(OPENERS), None),
        };
        for &turn in turns {
            let connective = pick(CONNECTIVES);
            tokens.extend(words(connective, None));
            tokens.extend(words(pick(clause_options(turn)), None));
        }
        match goal_label {
            Some(l) => tokens.extend(words(pick(OBJECT_CLOSERS), Some(l))),
            None => tokens.extend(words(pick(CLOSERS), None)),
        }
        tokens
    }
}

impl Speaker for TemplateSpeaker {
    fn tag(&self) -> &str {
        TEMPLATE_SPEAKER_TAG
    }

    fn speak(
        &self,
        ctx: &SpeakerContext<'_>,
        trajectory: &Trajectory,
        seed: u64,
    ) -> Result<InstructionRecord, InstructError> {
        self.bands.validate()?;
        let nodes = &trajectory.node_ids;
        if nodes.len() < 2 {
            return Err(InstructError::TooShort(nodes.len()));
        }
        let n = ctx.graph.node_count() as u32;
        if let Some(&bad) = nodes.iter().find(|&&id| id >= n) {
            return Err(InstructError::UnknownViewpoint(bad));
        }
        let points: Vec<Point2D> = nodes.iter().map(|&id| ctx.graph.position(id)).collect();
        let turns = classify_turns(&points, &self.bands);

        let start_label = object_at(ctx.objects, nodes[0]).map(|o| o.label.as_str());
        let goal_object = trajectory
            .target_object
            .and_then(|id| ctx.objects.iter().find(|o| o.object_id == id))
            .or_else(|| object_at(ctx.objects, *nodes.last().expect("non-empty")));
        let goal_label = goal_object.map(|o| o.label.as_str());

        let mut rng = rng_from_seed(derive_seed(seed, "speaker"));
        let mut tokens = self.compose(&turns, start_label, goal_label, Some(&mut rng));
        if tokens.len() > MAX_TOKENS {
            tokens = self.compose(&turns, start_label, goal_label, None);
        }
        if tokens.len() > MAX_TOKENS {
            return Err(InstructError::TooLong(tokens.len()));
        }
        // Openers and closers are at least four words each.
        debug_assert!(tokens.len() >= MIN_TOKENS);
        Ok(InstructionRecord { tokens, speaker_tag: TEMPLATE_SPEAKER_TAG.to_string() })
    }
}

/// Instruction for `trajectory` from the default template speaker.
pub fn generate_instruction(
    graph: &NavGraph,
    objects: &[ObjectAnnotation],
    trajectory: &Trajectory,
    seed: u64,
) -> Result<InstructionRecord, InstructError> {
    TemplateSpeaker::default().speak(&SpeakerContext { graph, objects }, trajectory, seed)
}
