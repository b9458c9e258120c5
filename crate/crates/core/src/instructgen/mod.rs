//! Instruction generation for sampled trajectories and BLEU-4 scoring of
//! generated text against references.

mod bleu;
mod speaker;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bleu::{bleu4, corpus_bleu4, tokenize, BleuScore, BLEU_ORDER};
pub use speaker::{
    classify_turns, generate_instruction, Speaker, SpeakerContext, TemplateSpeaker, TurnBands, TurnClass,
    DIRECTION_TOKENS, MAX_TOKENS, MIN_TOKENS, TEMPLATE_SPEAKER_TAG,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstructError {
    #[error("trajectory has {0} node(s); at least 2 are required")]
    TooShort(usize),
    #[error("trajectory references viewpoint {0} missing from the graph")]
    UnknownViewpoint(u32),
    #[error("instruction would need {0} tokens, above the limit")]
    TooLong(usize),
    #[error("invalid turn bands: {0}")]
    InvalidBands(String),
    #[error("BLEU needs a non-empty candidate and at least one non-empty reference")]
    EmptyInput,
}

/// A generated instruction: lowercase word tokens and the speaker that made it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstructionRecord {
    pub tokens: Vec<String>,
    pub speaker_tag: String,
}

impl InstructionRecord {
    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }
}
