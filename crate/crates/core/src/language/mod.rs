//! The generated-language channel between the agents: template NLG,
//! rule-based NLU, frame-level noise, and NLG/NLU quality metrics.

mod bleu;
mod metrics;
mod nlu;
mod noise;
mod templates;

use serde::{Deserialize, Serialize};

use crate::acts::Role;

pub use bleu::{bleu_max, sentence_bleu, MAX_ORDER};
pub use metrics::{evaluate_nlu, frames_to_tags, score_predictions, AnnotatedUtterance, NluScores};
pub use nlu::RuleNlu;
pub use noise::{apply_noise, NoiseConfig, NoiseContext};
pub use templates::{lexicalize, normalize, TemplateStore, SEGMENT_SEPARATOR};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utterance {
    /// Empty when the speaker produced no output.
    pub text: String,
    pub speaker: Role,
    pub turn_index: usize,
}
